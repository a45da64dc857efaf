#!/usr/bin/env python3
"""
量子电池充电模拟
主程序入口

Usage:
    python main.py {spectrum,charge,sweep,fit,verify} [--config FILE] [--out DIR]
                   [--seed N] [--workers N] [--format {csv,jsonl}]
"""
import sys
from pathlib import Path

# 确保项目根目录在 Python 路径中
sys.path.insert(0, str(Path(__file__).resolve().parent))

from src.cli.app import BatteryApp
from src.utils.logger import battery_logger


def main():
    """主函数"""
    try:
        code = BatteryApp().run(sys.argv[1:])

    except KeyboardInterrupt:
        battery_logger.info("Run interrupted by user")
        code = 130

    except Exception as e:
        battery_logger.error(f"Fatal error: {e}", exc_info=True)
        print(f"\n\nFatal Error: {e}", file=sys.stderr)
        print("Please check logs for details.", file=sys.stderr)
        code = 1

    sys.exit(code)


if __name__ == "__main__":
    main()
