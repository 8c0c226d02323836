"""``geovault`` command line.

Exit codes: 0 success, 1 domain error (``<ErrorName>: message`` on stderr),
2 usage error. Authentication is per invocation: commands that reveal
plaintext take ``--pattern`` or read one line from stdin.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import analysis, lockscreen, store
from .errors import GeoVaultError, NoLocation, NotEnrolled, RotationPending, VaultExists
from .geokey import GeoFix
from .geosim import DeviceState, GeoFence, inside, load_trace, step
from .lockscreen import Access, Pattern, Request

VAULT_ENV = "GEOVAULT_PATH"


class UsageError(Exception):
    pass


def _range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None


def _fence(text: str) -> GeoFence:
    try:
        return GeoFence.parse(text)
    except GeoVaultError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vault", default=os.environ.get(VAULT_ENV), help=f"vault file (default ${VAULT_ENV})")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--lat-range", type=_range, required=True, metavar="A:B")
    grid.add_argument("--lon-range", type=_range, required=True, metavar="A:B")
    grid.add_argument("--step", type=float, default=0.01)

    p = argparse.ArgumentParser(prog="geovault", description="Location-keyed record vault with a pattern lock.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("init", parents=[common], help="create a vault and enroll a pattern")
    s.add_argument("--pattern", required=True)
    s.add_argument("--fence", type=_fence, required=True, metavar="LATMIN,LATMAX,LONMIN,LONMAX")
    s.add_argument("--salt-hex", help="fixed enrollment salt (testing only)")
    s.add_argument("--force", action="store_true", help="overwrite an existing vault")

    s = sub.add_parser("locate", parents=[common], help="report a new device location")
    s.add_argument("--lat", type=float, required=True)
    s.add_argument("--lon", type=float, required=True)

    s = sub.add_parser("trace", parents=[common], help="replay a t,lat,lon CSV trace")
    s.add_argument("--file", required=True)
    s.add_argument("--step-through", action="store_true", help="print every sample")

    s = sub.add_parser("store", parents=[common], help="encrypt and store a message at the current location")
    s.add_argument("--text", required=True)
    s.add_argument("--lat", type=float)
    s.add_argument("--lon", type=float)

    s = sub.add_parser("get", parents=[common], help="decrypt one message")
    s.add_argument("--id", type=int, required=True)
    s.add_argument("--pattern")

    s = sub.add_parser("find", parents=[common], help="decrypt messages containing a term")
    s.add_argument("--term", required=True)
    s.add_argument("--pattern")

    sub.add_parser("list", parents=[common], help="raw stored records (no decryption)")

    s = sub.add_parser("status", parents=[common], help="vault and lock state")
    s.add_argument("--pattern")

    s = sub.add_parser("rotate", parents=[common], help="accept or skip a proposed pattern")
    s.add_argument("--pattern")
    choice = s.add_mutually_exclusive_group(required=True)
    choice.add_argument("--accept", action="store_true")
    choice.add_argument("--skip", action="store_true")
    s.add_argument("--fence", type=_fence, metavar="LATMIN,LATMAX,LONMIN,LONMAX")

    audit = sub.add_parser("audit", help="security audits").add_subparsers(dest="audit", required=True)
    audit.add_parser("leak", parents=[common], help="decrypt everything from the vault file alone")
    audit.add_parser("census", parents=[grid], help="count key pairs a region can produce")
    s = audit.add_parser("brute", parents=[common, grid], help="search the location keyspace for one pair")
    s.add_argument("--id", type=int, required=True)
    s.add_argument("--redact-keys", action="store_true", help="blank the header keys before searching")
    return p


class App:
    def __init__(self, args: argparse.Namespace, stdin: TextIO, stdout: TextIO):
        self.args = args
        self.stdin = stdin
        self.stdout = stdout

    def out(self, line: str) -> None:
        print(line, file=self.stdout)

    @property
    def vault_path(self) -> Path:
        if not self.args.vault:
            raise UsageError(f"--vault is required (or set ${VAULT_ENV})")
        return Path(self.args.vault)

    def load(self) -> store.Vault:
        return store.open_vault(self.vault_path)

    def meta(self, v: store.Vault) -> lockscreen.LockMeta:
        if v.meta is None:
            raise NotEnrolled("vault has no enrolled pattern")
        return v.meta

    def attempt(self, meta: lockscreen.LockMeta) -> list[int]:
        text = self.args.pattern
        if text is None:
            if self.stdin.isatty():
                sys.stderr.write(lockscreen.prompt_banner(meta))
                sys.stderr.flush()
            text = self.stdin.readline()
        return lockscreen.parse_cells(text)

    def unlock_for_plaintext(self, v: store.Vault) -> None:
        meta = self.meta(v)
        session = lockscreen.verify_pattern(meta, self.attempt(meta))
        if lockscreen.view_policy(session, Request.READ_PLAINTEXT) is not Access.ALLOW:
            raise RotationPending("a pattern rotation is pending; run 'rotate --accept' or 'rotate --skip' first")

    # ------------------------------------------------------------ commands

    def cmd_init(self) -> None:
        path = self.vault_path
        with store.vault_lock(path):
            if path.exists() and not self.args.force:
                raise VaultExists(f"{path} already exists (use --force to overwrite)")
            salt = bytes.fromhex(self.args.salt_hex) if self.args.salt_hex else None
            meta = lockscreen.enroll(Pattern.parse(self.args.pattern), self.args.fence, salt)
            store.save_vault(store.Vault(meta=meta, path=path))
        self.out(f"initialized {path} plen={meta.pattern_len}")

    def _move(self, v: store.Vault, fix: GeoFix) -> bool:
        """Update the device location; True when this move proposed a rotation."""
        before = v.meta
        if v.location is not None and v.meta is not None:
            v.meta = lockscreen.observe_fix(v.meta, v.location, fix)
        v.location = fix
        return before is not None and not before.pending_rotation and v.meta.pending_rotation

    def cmd_locate(self) -> None:
        with store.vault_lock(self.vault_path):
            v = self.load()
            fix = GeoFix(self.args.lat, self.args.lon)
            rotated = self._move(v, fix)
            store.save_vault(v)
        meta = self.meta(v)
        if rotated:
            self.out(f"ROTATION proposed seed={','.join(meta.proposed_seed)}")
        self.out(f"location={fix.lat!r},{fix.lon!r} inside={_yn(inside(meta.fence, fix))} pending={_yn(meta.pending_rotation)}")

    def cmd_trace(self) -> None:
        script = load_trace(self.args.file)
        rotations = 0
        with store.vault_lock(self.vault_path):
            v = self.load()
            self.meta(v)
            state = DeviceState(v.location or script[0].fix, v.location)
            for i, sample in enumerate(script.samples):
                # the device state mirrors v.location, so only the new fix matters
                state = step(state, script, i)
                if self._move(v, state.current):
                    rotations += 1
                    self.out(f"ROTATION t={sample.t:g} seed={','.join(v.meta.proposed_seed)}")
                if self.args.step_through:
                    self.out(
                        f"t={sample.t:g} lat={sample.fix.lat!r} lon={sample.fix.lon!r} "
                        f"inside={_yn(inside(v.meta.fence, sample.fix))} pending={_yn(v.meta.pending_rotation)}"
                    )
            store.save_vault(v)
        self.out(f"samples={len(script)} rotations={rotations} pending={_yn(v.meta.pending_rotation)}")

    def cmd_store(self) -> None:
        with store.vault_lock(self.vault_path):
            v = self.load()
            if (self.args.lat is None) != (self.args.lon is None):
                raise UsageError("--lat and --lon go together")
            if self.args.lat is not None:
                fix = GeoFix(self.args.lat, self.args.lon)
            elif v.location is not None:
                fix = v.location
            else:
                raise NoLocation("no device location; run 'locate' first or pass --lat/--lon")
            before = v.pairs_allocated
            handle = store.put_message(v, self.args.text, fix)
        self.out(f"stored id={handle} pairs={v.pairs_allocated - before}")

    def cmd_get(self) -> None:
        v = self.load()
        self.unlock_for_plaintext(v)
        self.out(store.get_message(v, self.args.id))

    def cmd_find(self) -> None:
        v = self.load()
        self.unlock_for_plaintext(v)
        for handle, text in store.find_messages(v, self.args.term):
            self.out(f"{handle} {text}")

    def cmd_list(self) -> None:
        for _, value in store.list_records(self.load()):
            self.out(value)

    def cmd_status(self) -> None:
        v = self.load()
        meta = self.meta(v)
        locked = True
        if self.args.pattern is not None:
            lockscreen.verify_pattern(meta, lockscreen.parse_cells(self.args.pattern))
            locked = False
        self.out(f"pairs={v.pairs_allocated} locked={_yn(locked)} pending={_yn(meta.pending_rotation)}")

    def cmd_rotate(self) -> None:
        if self.args.accept and self.args.fence is None:
            raise UsageError("--accept needs --fence for the new boundary")
        with store.vault_lock(self.vault_path):
            v = self.load()
            meta = self.meta(v)
            old = self.attempt(meta)
            if self.args.accept:
                new_pattern = lockscreen.rotation_pattern(meta) if meta.pending_rotation else None
                v.meta = lockscreen.apply_rotation(meta, old, True, self.args.fence)
            else:
                v.meta = lockscreen.apply_rotation(meta, old, False)
            store.save_vault(v)
        if self.args.accept:
            self.out(f"rotated pattern={new_pattern} fence={v.meta.fence.as_text()}")
            if list(new_pattern.cells) == old:
                self.out("warning: generated pattern equals the old pattern")
        else:
            self.out("rotation skipped")

    def cmd_audit(self) -> None:
        getattr(self, f"audit_{self.args.audit}")()

    def audit_leak(self) -> None:
        recovered = analysis.leak_decrypt_file(self.vault_path)
        for handle, text in recovered:
            self.out(f"LEAK {handle} {text}")
        self.out(f"RECOVERED {len(recovered)}")

    def _grid(self) -> analysis.GridSpec:
        try:
            return analysis.GridSpec(self.args.lat_range, self.args.lon_range, self.args.step)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def audit_census(self) -> None:
        self.out(analysis.format_census(*analysis.keyspace_census(self._grid())))

    def audit_brute(self) -> None:
        g = self._grid()
        v = self.load()
        pair = v.pair_at(self.args.id)
        p1 = (pair.part1.address, v.records[pair.part1.address])
        p2 = (pair.part2.address, v.records[pair.part2.address])
        if self.args.redact_keys:
            p1 = (p1[0], analysis.redact_keys(p1[1]))
            p2 = (p2[0], analysis.redact_keys(p2[1]))
        for cand in analysis.brute_force_pair(p1, p2, g):
            self.out(analysis.format_candidate(cand))
        self.out(analysis.format_census(*analysis.keyspace_census(g)))


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def run(argv: Sequence[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    app = App(args, stdin or sys.stdin, stdout or sys.stdout)
    try:
        getattr(app, f"cmd_{args.command}")()
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"geovault: error: {exc}", file=sys.stderr)
        return 2
    except GeoVaultError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
