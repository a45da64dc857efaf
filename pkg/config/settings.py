"""
全局配置管理模块
从环境变量加载运行配置，数值常量集中定义
"""
import math
import os
from pathlib import Path
from dotenv import load_dotenv

# 加载 .env 文件
load_dotenv()

# 项目根目录
BASE_DIR = Path(__file__).resolve().parent.parent


class Settings:
    """全局配置类"""

    # ======================
    # 运行资源配置（仅这两项允许环境变量覆盖）
    # ======================
    WORKERS: int = int(os.getenv('BATTERY_WORKERS', '1'))
    DENSE_CAP: int = int(os.getenv('BATTERY_DENSE_CAP', '12'))

    # ======================
    # 日志配置
    # ======================
    LOG_LEVEL: str = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE: str = os.getenv('LOG_FILE', str(BASE_DIR / 'logs' / 'battery.log'))
    DEBUG: bool = os.getenv('DEBUG', 'False').lower() == 'true'

    # ======================
    # 算子代数
    # ======================
    PRUNE_THRESHOLD: float = 1e-14

    # ======================
    # 充电协议
    # ======================
    WORK_GRID_SAMPLES: int = 2048
    WORK_WINDOW: float = 4 * math.pi  # t_max = WORK_WINDOW / ΔH₁
    TAU_RTOL: float = 1e-6
    PEAK_GRID_RTOL: float = 1e-3
    G2_BASE_STEP: float = 1e-3
    BHATIA_RTOL: float = 1e-9
    SANDWICH_THRESHOLD: float = 0.5
    DEFAULT_TARGET_FRACTION: float = 1.0

    # ======================
    # 系综与拟合
    # ======================
    SWEEP_FAILURE_THRESHOLD: float = 0.1
    SEED_UNIFORMITY_PVALUE: float = 1e-3
    FIT_TOLERANCE: float = 0.3
    RECORD_SCHEMA_VERSION: int = 1

    @classmethod
    def validate(cls):
        """验证配置项"""
        from src.utils.exceptions import ConfigurationError

        if cls.WORKERS < 1:
            raise ConfigurationError("BATTERY_WORKERS must be at least 1")

        if cls.DENSE_CAP < 1:
            raise ConfigurationError("BATTERY_DENSE_CAP must be at least 1")

        if cls.DENSE_CAP > 14:
            raise ConfigurationError(
                "BATTERY_DENSE_CAP above 14 exceeds dense storage limits "
                "(Hilbert dimension 16384)"
            )

    @classmethod
    def display(cls, logger):
        """输出当前配置"""
        logger.info("=" * 50)
        logger.info("Current Configuration:")
        logger.info(f"WORKERS: {cls.WORKERS}")
        logger.info(f"DENSE_CAP: {cls.DENSE_CAP}")
        logger.info(f"PRUNE_THRESHOLD: {cls.PRUNE_THRESHOLD:g}")
        logger.info(f"WORK_GRID_SAMPLES: {cls.WORK_GRID_SAMPLES}")
        logger.info(f"SWEEP_FAILURE_THRESHOLD: {cls.SWEEP_FAILURE_THRESHOLD:.0%}")
        logger.info(f"LOG_LEVEL: {cls.LOG_LEVEL}")
        logger.info(f"LOG_FILE: {cls.LOG_FILE}")
        logger.info(f"DEBUG: {cls.DEBUG}")
        logger.info("=" * 50)


# 全局配置实例
settings = Settings()

# 导出
__all__ = ['settings', 'Settings', 'BASE_DIR']
