"""
日志系统配置模块
主进程写控制台与滚动日志文件；扫描子进程只向控制台报告警告以上的消息
"""
import logging
import multiprocessing
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from config.settings import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# 所有模块级日志记录器的公共前缀
ROOT_NAME = 'battery'


def _in_worker() -> bool:
    """当前是否为 ProcessPoolExecutor 的子进程"""
    return multiprocessing.parent_process() is not None


def setup_logger(
    name: str,
    log_file: Optional[str] = None,
    level: Optional[str] = None,
    max_bytes: int = 10 * 1024 * 1024,  # 10 MB
    backup_count: int = 5
) -> logging.Logger:
    """
    配置并返回日志记录器；同名记录器只配置一次

    子进程中不挂文件处理器，多个进程轮转同一个文件会互相截断。

    Args:
        name: 日志记录器名称
        log_file: 日志文件路径（可选）
        level: 日志级别，缺省取 settings.LOG_LEVEL
        max_bytes: 单个日志文件最大字节数
        backup_count: 保留的备份文件数量

    Returns:
        Logger 实例
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, (level or settings.LOG_LEVEL).upper()))
    if logger.handlers:
        return logger

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    worker = _in_worker()

    # stdout 留给表格输出
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(formatter)
    if worker:
        console.setLevel(logging.WARNING)
    else:
        console.setLevel(logging.DEBUG if settings.DEBUG else logging.INFO)
    logger.addHandler(console)

    if log_file and not worker:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            filename=log_file,
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

    return logger


def _sibling_log(stem: str) -> str:
    """主日志文件同目录下的分类日志"""
    return str(Path(settings.LOG_FILE).with_name(f'{stem}.log'))


# 创建全局日志实例
battery_logger = setup_logger(ROOT_NAME, settings.LOG_FILE)
model_logger = setup_logger('models', _sibling_log('models'))
ensemble_logger = setup_logger('ensemble', _sibling_log('ensemble'))
scaling_logger = setup_logger('scaling', _sibling_log('scaling'))


def get_logger(name: str) -> logging.Logger:
    """
    模块内临时使用的日志记录器

    挂在 battery 之下，不单独配置处理器，消息经由 battery_logger 输出。

    Args:
        name: 通常为 __name__

    Returns:
        Logger 实例
    """
    return battery_logger.getChild(name.rsplit('.', 1)[-1])


__all__ = [
    'setup_logger',
    'get_logger',
    'battery_logger',
    'model_logger',
    'ensemble_logger',
    'scaling_logger',
    'ROOT_NAME'
]
