"""Console output for flows and the command line.

Library modules never print; flows, tasks and the command line report
progress through these helpers (Prefect captures them with ``log_prints``).
"""

WIDTH = 70


def _line(symbol: str, text: str, indent: int = 2) -> None:
    print(f"{' ' * indent}{symbol} {text}")


def print_banner():
    """Print the main banner."""
    title = "Sliding-Mode Control of Two-Level Quantum Systems"
    print("\n" + "█" * WIDTH)
    print("█" + title.center(WIDTH - 2) + "█")
    print("█" * WIDTH + "\n")


def print_header(text: str):
    """Print a section header."""
    print("\n" + "=" * WIDTH)
    print(f"  {text}")
    print("=" * WIDTH + "\n")


def print_step(text: str):
    _line("➜", text, indent=0)


def print_success(text: str):
    _line("✓", text)


def print_info(text: str):
    _line("ℹ", text)


def print_warning(text: str):
    _line("⚠", text)


def print_error(text: str):
    _line("✗", text)


def print_kv(key: str, value) -> None:
    """Print one aligned ``key value`` line of a design summary."""
    if isinstance(value, float):
        value = f"{value:.6g}"
    print(f"    • {key:<24} {value}")


def print_check(name: str, passed: bool, detail: str = "") -> None:
    """Print a PASS/FAIL line for one verification check."""
    status = "PASS" if passed else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    _line("✓" if passed else "✗", f"[{status}] {name}{suffix}")
