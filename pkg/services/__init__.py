"""Пакет сервисов конвейера отслеживания зрачка."""

# Подпакеты импортируются напрямую: services.events, services.slicing, ...
