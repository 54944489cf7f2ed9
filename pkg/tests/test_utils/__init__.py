"""Тесты для утилит"""








