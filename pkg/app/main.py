"""
File: app/main.py
Description: 命令行入口

本模块负责：
1. 在 command_scope 内执行 typer 命令 (run_id / 耗时 / 退出码日志)
2. 把任意异常交给全局异常处理器，输出失败信封并返回退出码
3. 提供 console script 入口 main()

Author: jinmozhe
Created: 2026-03-07
"""

import sys
from collections.abc import Sequence

import click
import typer

from app.cli_router import cli
from app.core.error_code import EXIT_OK
from app.core.exceptions import handle_exception
from app.core.middleware import command_scope

PROG_NAME = "kaleido"


def run(argv: Sequence[str] | None = None) -> int:
    """执行一次命令并返回退出码 (不调用 sys.exit，便于测试)。"""
    args = list(sys.argv[1:] if argv is None else argv)
    command = typer.main.get_command(cli)

    with command_scope(PROG_NAME, args) as scope:
        try:
            command.main(args=args, prog_name=PROG_NAME, standalone_mode=False)
            exit_code = EXIT_OK
        except click.exceptions.Exit as exc:
            # --help 等提前退出
            exit_code = exc.exit_code
        except Exception as exc:
            exit_code, envelope = handle_exception(exc)
            envelope.echo()
        scope.exit_code = exit_code
    return exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
