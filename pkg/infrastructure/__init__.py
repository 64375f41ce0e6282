"""Infrastructure Package"""
