import os
from grope_split import __version__


class Core:
    """ Базовые константы и настройки движка """

    DEFAULT_BUDGET = 1_000_000
    DEFAULT_GROPE_HEIGHT = 2
    DEFAULT_ORACLE_LIMIT = 12
    DEFAULT_SEARCH_LIMIT = 200_000

    @staticmethod
    def get_budget() -> int:
        return int(os.environ.get("GS_BUDGET", str(Core.DEFAULT_BUDGET)))

    @staticmethod
    def get_grope_height() -> int:
        return int(os.environ.get("GS_GROPE_HEIGHT", str(Core.DEFAULT_GROPE_HEIGHT)))

    @staticmethod
    def get_oracle_limit() -> int:
        return int(os.environ.get("GS_ORACLE_LIMIT", str(Core.DEFAULT_ORACLE_LIMIT)))

    @staticmethod
    def get_search_limit() -> int:
        return int(os.environ.get("GS_SEARCH_LIMIT", str(Core.DEFAULT_SEARCH_LIMIT)))

    @staticmethod
    def get_jobs() -> int | None:
        value = os.environ.get("GS_JOBS")
        return int(value) if value else None

    @staticmethod
    def compose_banner() -> str:
        """ Заголовок для сгенерированных DOT файлов """
        version_string = f'grope_split v{__version__}'
        return (
            f"// {'-' * len(version_string)}\n"
            f"// {version_string}\n"
            f"// {'-' * len(version_string)}\n"
        )
