"""
PROGRESS REPORT - Console progress for long enumerations
Logs percentage, completed blocks, elapsed and remaining time
"""

import logging
import time
from typing import Optional

logger = logging.getLogger(__name__)


class EnumerationProgress:
    """
    Progress of a blocked enumeration, reported through logging

    Lines are throttled to one every `interval` seconds; the last
    block always reports.
    """

    def __init__(self, total_items: int, title: str = "Enumerating", interval: float = 5.0,
                 log: Optional[logging.Logger] = None):
        self.total_items = total_items
        self.current_item = 0
        self.title = title
        self.interval = interval
        self.log = log or logger
        self.start_time = time.monotonic()
        self._last_report = self.start_time

        self.log.info("🔍 %s (%d blocks)", self.title, self.total_items)

    def advance(self, items: int = 1):
        """Mark `items` more blocks as done"""
        self.current_item += items
        now = time.monotonic()
        if self.current_item >= self.total_items or now - self._last_report >= self.interval:
            self._last_report = now
            self._render(now)

    def _render(self, now: float):
        progress = self.current_item / self.total_items if self.total_items > 0 else 1.0
        elapsed_time = now - self.start_time
        if self.current_item > 0:
            avg_time_per_item = elapsed_time / self.current_item
            estimated_remaining = avg_time_per_item * (self.total_items - self.current_item)
        else:
            estimated_remaining = 0

        self.log.info(
            "   %s: %d%% (%d/%d) elapsed %s, remaining %s",
            self.title,
            int(progress * 100),
            self.current_item,
            self.total_items,
            self._format_time(elapsed_time),
            self._format_time(estimated_remaining),
        )

    @staticmethod
    def _format_time(seconds: float) -> str:
        """Human readable duration"""
        if seconds < 1:
            return "< 1s"
        elif seconds < 60:
            return f"{int(seconds)}s"
        elif seconds < 3600:
            minutes = int(seconds / 60)
            secs = int(seconds % 60)
            return f"{minutes}m {secs}s"
        else:
            hours = int(seconds / 3600)
            minutes = int((seconds % 3600) / 60)
            return f"{hours}h {minutes}m"

    def complete(self, success_message: Optional[str] = None):
        elapsed = time.monotonic() - self.start_time
        self.log.info(success_message or f"✅ {self.title} complete in {self._format_time(elapsed)}")
