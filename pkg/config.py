"""
统一配置管理
支持从环境变量、.env 文件或 config.json 加载配置
"""
import os
import json
import logging
from pathlib import Path
from typing import Optional, Any

# 尝试加载 python-dotenv
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger(__name__)


class Config:
    """配置类"""

    def __init__(self):
        self._config_file: Optional[Path] = None
        self._json_config: dict = {}

        # 尝试加载 config.json
        self._load_json_config()

        # 数值积分
        self.QUAD_ABS_TOL = self._get("quadrature", "abs_tol", 1e-10)
        self.QUAD_MAX_DEPTH = self._get("quadrature", "max_depth", 60)

        # 核函数 CDF 表（JS 没有闭式 CDF）
        self.KERNEL_TABLE_STEP = self._get("kernel", "table_step", 0.005)
        self.KERNEL_TABLE_LIMIT = self._get("kernel", "table_limit", 40.0)

        # 嵌入维度上限：4·J·d 或 2·s·d 超过即拒绝
        self.MEMORY_GUARD = self._get("embed", "memory_guard", 100_000_000)

        # 线性草图常数 m = ⌈c_a/ε²⌉, R = ⌈c_b·ln(1/δ)⌉
        self.SKETCH_WIDTH_CONSTANT = self._get("sketch", "width_constant", 6.0)
        self.SKETCH_REPS_CONSTANT = self._get("sketch", "reps_constant", 8.0)

        # 随机嵌入默认采样数
        self.DEFAULT_SAMPLES = self._get("sampling", "default_samples", 2000)

        # 降维
        self.JL_CONSTANT = self._get("dimred", "jl_constant", 16.0)
        self.BALL_C0 = self._get("dimred", "c0", 0.1)
        self.CALIBRATION_PAIRS = self._get("dimred", "calibration_pairs", 1000)
        self.CALIBRATION_MAX_HALVINGS = self._get("dimred", "max_halvings", 60)

        # 运行时
        self.DEFAULT_SEED = self._get("runtime", "seed", 0)
        self.LOG_LEVEL = self._get("runtime", "log_level", "INFO")

    def _load_json_config(self):
        """从 config.json 加载配置"""
        config_paths = [
            Path("config.json"),
            Path.home() / ".infodiv" / "config.json",
        ]

        for path in config_paths:
            if path.exists():
                try:
                    with open(path, 'r', encoding='utf-8') as f:
                        self._json_config = json.load(f)
                    self._config_file = path
                    logger.info(f"已加载配置文件: {path}")
                    return
                except Exception as e:
                    logger.warning(f"加载配置文件失败 {path}: {e}")

        self._json_config = {}

    def _get(self, section: str, key: str, default: Any = None) -> Any:
        """获取配置值"""
        # 1. 环境变量
        env_keys = [f"{section.upper()}_{key.upper()}", f"INFODIV_{key.upper()}"]
        for env_key in env_keys:
            env_val = os.getenv(env_key)
            if env_val is not None:
                if isinstance(default, bool):
                    return env_val.lower() in ('true', '1', 'yes', 'on')
                elif isinstance(default, int):
                    try:
                        return int(env_val)
                    except ValueError:
                        return default
                elif isinstance(default, float):
                    try:
                        return float(env_val)
                    except ValueError:
                        return default
                return env_val

        # 2. config.json
        if section in self._json_config and key in self._json_config[section]:
            return self._json_config[section][key]

        # 3. 默认值
        return default

    def validate(self) -> list[str]:
        """验证配置是否合理，返回问题列表"""
        problems = []

        if self.QUAD_ABS_TOL <= 0:
            problems.append("quadrature.abs_tol 必须 > 0")
        if self.QUAD_MAX_DEPTH < 1:
            problems.append("quadrature.max_depth 必须 ≥ 1")
        if self.KERNEL_TABLE_STEP <= 0 or self.KERNEL_TABLE_LIMIT <= 1:
            problems.append("kernel.table_step / kernel.table_limit 无效")
        if self.MEMORY_GUARD < 1:
            problems.append("embed.memory_guard 必须 ≥ 1")
        if self.SKETCH_WIDTH_CONSTANT <= 0 or self.SKETCH_REPS_CONSTANT <= 0:
            problems.append("sketch.width_constant / sketch.reps_constant 必须 > 0")
        if self.DEFAULT_SAMPLES < 1:
            problems.append("sampling.default_samples 必须 ≥ 1")
        if self.JL_CONSTANT <= 0:
            problems.append("dimred.jl_constant 必须 > 0")
        if not 0 < self.BALL_C0 < 1:
            problems.append("dimred.c0 必须在 (0, 1) 内")
        if self.CALIBRATION_PAIRS < 1:
            problems.append("dimred.calibration_pairs 必须 ≥ 1")

        return problems

    def print_config(self):
        """打印当前配置"""
        print("=" * 50)
        print("当前配置:")
        print("=" * 50)
        if self._config_file:
            print(f"  配置文件: {self._config_file}")

        print(f"\n[quadrature]")
        print(f"  abs_tol: {self.QUAD_ABS_TOL}")
        print(f"  max_depth: {self.QUAD_MAX_DEPTH}")

        print(f"\n[kernel]")
        print(f"  table_step: {self.KERNEL_TABLE_STEP}")
        print(f"  table_limit: {self.KERNEL_TABLE_LIMIT}")

        print(f"\n[embed / sampling]")
        print(f"  memory_guard: {self.MEMORY_GUARD}")
        print(f"  default_samples: {self.DEFAULT_SAMPLES}")

        print(f"\n[sketch]")
        print(f"  width_constant: {self.SKETCH_WIDTH_CONSTANT}")
        print(f"  reps_constant: {self.SKETCH_REPS_CONSTANT}")

        print(f"\n[dimred]")
        print(f"  jl_constant: {self.JL_CONSTANT}")
        print(f"  c0: {self.BALL_C0}")
        print(f"  calibration_pairs: {self.CALIBRATION_PAIRS}")

        print(f"\n[runtime]")
        print(f"  seed: {self.DEFAULT_SEED}")
        print(f"  log_level: {self.LOG_LEVEL}")

        print("=" * 50)


config = Config()


if __name__ == "__main__":
    config.print_config()

    problems = config.validate()
    if problems:
        print(f"\n⚠️  配置问题:")
        for item in problems:
            print(f"  - {item}")
    else:
        print("\n✅ 配置有效")
