"""Точка входа: python main.py <подкоманда> [флаги]."""

import logging
import sys
from typing import List, Optional

from core.application import RetinaApplication

def main(argv: Optional[List[str]] = None) -> int:
    """Запускает подкоманду и возвращает код выхода (0-3, 130 при Ctrl+C)."""
    try:
        return RetinaApplication().run(argv)
    except KeyboardInterrupt:
        logging.getLogger(__name__).info("👋 Прервано пользователем (Ctrl+C)")
        return 130
    except Exception as e:
        # Необработанные ошибки вне иерархии RetinaError
        logging.getLogger(__name__).critical(f"💥 Непредвиденная ошибка: {e}", exc_info=True)
        return 1

if __name__ == "__main__":
    sys.exit(main())
