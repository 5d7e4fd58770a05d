class ApplicationError(Exception):
    """ Базовая ошибка приложения """


class UnknownBackendError(ApplicationError):
    """ Ошибка при запросе несуществующего бэкенда (группа, формат вывода) """


class MalformedInputError(ApplicationError):
    """ Некорректные входные данные: слово, генератор, документ модели """


class ShapeError(ApplicationError):
    """ Гропа не имеет нужной формы (например, ветви не диадические) """

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class PlanError(ApplicationError):
    """ Некорректный план расщепления """


class PreconditionError(ApplicationError):
    """ Нарушено предусловие операции """

    def __init__(self, message, culprit=None):
        super().__init__(message)
        self.culprit = culprit


class BudgetError(ApplicationError):
    """ Превышен бюджет объектов; хранит частичный результат """

    def __init__(self, message, partial=None, stage=None):
        super().__init__(message)
        self.partial = partial
        self.stage = stage


class IdempotencyError(ApplicationError):
    """ Операция уже была применена к этому объекту """


class DualPairReferenceError(ApplicationError):
    """ Ссылка на дуальную пару не разрешается """


class PrematureDischargeError(ApplicationError):
    """ Сфера ещё имеет пересечения, 3-ручку приклеить нельзя """


class IncompleteLedgerError(ApplicationError):
    """ В журнале ручек остались невыполненные обязательства """

    def __init__(self, message, pending=()):
        super().__init__(message)
        self.pending = tuple(pending)


class OracleScaleError(ApplicationError):
    """ Экземпляр слишком велик для переборного оракула """
