"""
Logging Decorator Tests.
Testes dos Decoradores de Logging.
"""

from django.test import SimpleTestCase

from depthfusion.decorators import log_errors, log_execution_time
from depthfusion.exceptions import EvaluationError


class DecoratorTest(SimpleTestCase):
    """
    Tests for log_execution_time and log_errors.
    Testes para log_execution_time e log_errors.
    """

    def test_execution_time_is_logged(self):
        @log_execution_time
        def add(a, b):
            return a + b

        with self.assertLogs("depthfusion.decorators", level="INFO") as logs:
            self.assertEqual(add(2, 3), 5)
        self.assertIn("add executed in", logs.output[0])
        self.assertEqual(add.__name__, "add")

    def test_errors_are_logged_with_category(self):
        """Test the category is logged and the error re-raised / Testa log de erros"""

        @log_errors
        def score():
            raise EvaluationError("no jointly valid pixels")

        with self.assertLogs("depthfusion.decorators", level="ERROR") as logs:
            with self.assertRaises(EvaluationError):
                score()
        self.assertIn("Error in score: [metrics] no jointly valid pixels", logs.output[0])

    def test_plain_errors_use_type_name(self):
        @log_errors
        def parse():
            raise KeyError("seed")

        with self.assertLogs("depthfusion.decorators", level="ERROR") as logs:
            with self.assertRaises(KeyError):
                parse()
        self.assertIn("[KeyError]", logs.output[0])
