import importlib.util
import logging
import re
from pathlib import Path
from typing import Any, Dict, Optional, Type

logger = logging.getLogger(__name__)


class SuiteLoader:
    def __init__(self, suites_path: Optional[str] = None, config: Optional[Dict[str, Any]] = None):
        """
        :param suites_path: Where suite_*.py files live.
        :param config: module name -> {"enabled": bool}, used to skip disabled suites.
        """
        if suites_path is None:
            suites_path = Path(__file__).parent.parent / "suites"
        self.suites_path = Path(suites_path)
        self.suites_config = config or {}
        self.loaded_suites: Dict[str, Type[Any]] = {}
        logger.debug(f"SuiteLoader initialized with path: {self.suites_path}")

    def load_suites(self) -> None:
        if not self.suites_path.exists():
            logger.error(f"Suites directory not found: {self.suites_path}")
            return

        for suite_file in sorted(self.suites_path.glob("suite_*.py")):
            try:
                file_text = suite_file.read_text()
                class_match = re.search(r"class\s+(\w+)\(.*SuiteBase.*\):", file_text)
                if not class_match:
                    logger.error(f"No recognized suite class in {suite_file}")
                    continue

                class_name = class_match.group(1)
                module_name = suite_file.stem
                suite_cfg = self.suites_config.get(class_name) or self.suites_config.get(module_name)
                if suite_cfg and suite_cfg.get("enabled") is False:
                    logger.warning(f"Suite {class_name} is disabled by config, skipping load.")
                    continue

                # load as a submodule so the suites' relative imports resolve
                qualified = f"bordered_khovanov.suites.{module_name}"
                spec = importlib.util.spec_from_file_location(qualified, suite_file)
                if spec and spec.loader:
                    module = importlib.util.module_from_spec(spec)
                    spec.loader.exec_module(module)
                    self.loaded_suites[module_name] = getattr(module, class_name)
                    logger.debug(f"Loaded suite {module_name} -> class {class_name}")
            except Exception as e:
                logger.error(f"Failed to load suite {suite_file}: {e}", exc_info=True)

    def get_suite(self, short_name: str) -> Optional[Type[Any]]:
        """Suite class by short name ('dd') or module name ('suite_dd')."""
        key = short_name if short_name.startswith("suite_") else f"suite_{short_name}"
        return self.loaded_suites.get(key)

    def get_all_suites(self) -> Dict[str, Type[Any]]:
        return self.loaded_suites.copy()
