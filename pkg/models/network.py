"""Описание архитектуры спайковой CNN.

Слои описываются pydantic-моделями с дискриминатором ``kind``, что даёт
разбор и запись JSON-описания сети без ручного кода.
"""

from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

class _Layer(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

class ConvSpec(_Layer):
    """Свёртка 2D."""
    kind: Literal["conv"] = "conv"
    c_in: int = Field(gt=0)
    c_out: int = Field(gt=0)
    k_x: int = Field(gt=0)
    k_y: int = Field(gt=0)
    s_x: int = Field(default=1, gt=0)
    s_y: int = Field(default=1, gt=0)
    p_x: int = Field(default=0, ge=0)
    p_y: int = Field(default=0, ge=0)
    bias: bool = False

    @property
    def kernel_area(self) -> int:
        return self.k_x * self.k_y

class BatchNormSpec(_Layer):
    """Батч-нормализация; статистики необязательны (по умолчанию тождественные)."""
    kind: Literal["batchnorm"] = "batchnorm"
    channels: int = Field(gt=0)
    eps: float = Field(default=1e-5, ge=0)
    gamma: Optional[List[float]] = None
    beta: Optional[List[float]] = None
    mean: Optional[List[float]] = None
    var: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_stats(self):
        for name in ("gamma", "beta", "mean", "var"):
            values = getattr(self, name)
            if values is not None and len(values) != self.channels:
                raise ValueError(f"{name}: ожидается {self.channels} значений")
        if self.var is not None and any(v <= 0 for v in self.var):
            raise ValueError("var должна быть положительной")
        return self

class IFSpec(_Layer):
    """Нейроны integrate-and-fire без утечки."""
    kind: Literal["if"] = "if"
    threshold: float = 1.0
    v_min: float = -1.0

    @model_validator(mode="after")
    def _check_range(self):
        if self.threshold <= self.v_min:
            raise ValueError("threshold должен быть больше v_min")
        return self

class SumPoolSpec(_Layer):
    """Суммирующий пулинг."""
    kind: Literal["sumpool"] = "sumpool"
    k: int = Field(gt=0)
    s: int = Field(gt=0)

class FlattenSpec(_Layer):
    """Разворачивание карты признаков в каналы 1x1."""
    kind: Literal["flatten"] = "flatten"

LayerSpec = Annotated[
    Union[ConvSpec, BatchNormSpec, IFSpec, SumPoolSpec, FlattenSpec],
    Field(discriminator="kind"),
]

class NetworkConfig(_Layer):
    """Упорядоченный список слоёв и форма входа (C, H, W)."""
    layers: List[LayerSpec] = Field(default_factory=list)
    input_shape: Tuple[int, int, int] = (2, 64, 64)
    name: str = "custom"

    @property
    def conv_indices(self) -> List[int]:
        return [i for i, layer in enumerate(self.layers) if isinstance(layer, ConvSpec)]

    @property
    def if_indices(self) -> List[int]:
        return [i for i, layer in enumerate(self.layers) if isinstance(layer, IFSpec)]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    @classmethod
    def from_json(cls, text: str) -> "NetworkConfig":
        return cls.model_validate_json(text)

_LAYER_LIST = TypeAdapter(List[LayerSpec])

def parse_layers(data) -> List:
    """Разбирает JSON-список объектов слоёв ({"kind": "conv", ...})."""
    return _LAYER_LIST.validate_python(data)

def _block(c_in: int, c_out: int, k: int, s: int, p: int, pool: bool) -> list:
    layers = [
        ConvSpec(c_in=c_in, c_out=c_out, k_x=k, k_y=k, s_x=s, s_y=s, p_x=p, p_y=p),
        BatchNormSpec(channels=c_out),
        IFSpec(),
    ]
    if pool:
        layers.append(SumPoolSpec(k=2, s=2))
    return layers

def retina_default() -> NetworkConfig:
    """Восемь блоков BatchConv-IF(-Pool) с выходом 160 = 4*4*2*5 каналов.

    Пространственная трасса: 64 -> 31 (5x5, шаг 2, паддинг 1) -> 15 -> 15 -> 7
    -> 7 -> 3 -> 3 -> 3 -> 3, затем Flatten 16*3*3 = 144 и свёртки 1x1.
    """
    layers = []
    layers += _block(2, 16, 5, 2, 1, pool=True)
    layers += _block(16, 64, 3, 1, 1, pool=True)
    layers += _block(64, 16, 3, 1, 1, pool=True)
    layers += _block(16, 16, 3, 1, 1, pool=False)
    layers += _block(16, 8, 3, 1, 1, pool=False)
    layers += _block(8, 16, 3, 1, 1, pool=False)
    layers.append(FlattenSpec())
    layers += _block(144, 128, 1, 1, 0, pool=False)
    layers += _block(128, 160, 1, 1, 0, pool=False)
    return NetworkConfig(layers=layers, input_shape=(2, 64, 64), name="retina")

def retina_core_layout() -> NetworkConfig:
    """Те же каналы и параметры, что у retina_default, но трасса под память ядер.

    Слой 2 работает на карте 32x32 (64 Ki нейронов, ядра 0-2), поэтому плотных
    MAC примерно в четыре раза больше: 64 -> 32 (5x5, шаг 2, паддинг 2) -> 32
    -> 16 -> 14 -> 7 -> 7 -> 5 -> 3, затем Flatten 144 и свёртки 1x1.
    """
    layers = []
    layers += _block(2, 16, 5, 2, 2, pool=False)
    layers += _block(16, 64, 3, 1, 1, pool=True)
    layers += _block(64, 16, 3, 1, 0, pool=True)
    layers += _block(16, 16, 3, 1, 1, pool=False)
    layers += _block(16, 8, 3, 1, 0, pool=False)
    layers += _block(8, 16, 3, 1, 0, pool=False)
    layers.append(FlattenSpec())
    layers += _block(144, 128, 1, 1, 0, pool=False)
    layers += _block(128, 160, 1, 1, 0, pool=False)
    return NetworkConfig(layers=layers, input_shape=(2, 64, 64), name="retina-cores")

def retina_tiny(hidden: int = 8) -> NetworkConfig:
    """Уменьшенная сеть для обучения на CPU: два спайковых блока и считывание.

    Считывание 1x1 без IF: фильтр получает вещественный выход, иначе его
    значения квантованы весами фильтра и координаты рамок не обучаются.
    """
    layers = []
    layers += _block(2, hidden, 5, 2, 1, pool=True)        # 64 -> 31 -> 15
    layers += _block(hidden, 16, 3, 1, 1, pool=True)       # 15 -> 15 -> 7
    layers.append(FlattenSpec())
    layers.append(ConvSpec(c_in=16 * 7 * 7, c_out=160, k_x=1, k_y=1, bias=True))
    return NetworkConfig(layers=layers, input_shape=(2, 64, 64), name="retina-tiny")
