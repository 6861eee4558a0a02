"""Resolved command-line configuration echoed into every artifact."""

import json
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    """Subcommand plus its validated flags."""

    model_config = {"extra": "forbid", "frozen": True}

    command: Literal["dist", "fit", "simulate"] = Field(..., description="Subcommand")
    action: Optional[str] = Field(default=None, description="dist subaction")
    options: dict[str, Any] = Field(default_factory=dict, description="Resolved flag values")
    version: str = Field(..., description="Library version")

    def header_lines(self) -> list[str]:
        """'# key: value' comment lines for CSV provenance."""
        lines = [f"# frontier-lab {self.version}", f"# command: {self.command}"]
        if self.action:
            lines.append(f"# action: {self.action}")
        lines.extend(f"# {key}: {json.dumps(value)}" for key, value in sorted(self.options.items()))
        return lines
