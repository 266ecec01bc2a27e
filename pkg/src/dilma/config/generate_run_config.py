#!/usr/bin/env python3
import argparse
from pathlib import Path

from pydantic import BaseModel

from .run_config import RunConfig, render_value


def generate_run_config_example(model_class: type[BaseModel] = RunConfig) -> str:
    lines = []

    for field_name, field_info in model_class.model_fields.items():
        description = field_info.description or ""

        value = "TODO" if field_info.is_required() else render_value(field_info.default)

        lines.append(f"# {description}")
        lines.append(f"{field_name.upper()}={value}")
        lines.append("")

    return "\n".join(lines)


def main() -> None:
    parser = argparse.ArgumentParser(description="Generate an example run config with every setting and its default")
    parser.add_argument("-o", "--output", default="run.env.example", help="Output file path (default: run.env.example)")

    args = parser.parse_args()

    output_path = Path(args.output)
    output_path.write_text(generate_run_config_example())
    print(f"Generated {output_path}")


if __name__ == "__main__":
    main()
