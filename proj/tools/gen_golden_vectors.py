#!/usr/bin/env python3
"""Regenerates fixtures/golden_vectors.json.

Each record is {"derivation", "inputs", "output"} with byte fields as
lowercase hex and counters as plain integers. The derivation layouts here
are the reference the C++ library is tested against, so any change to a
layout constant must be mirrored in both places.
"""

import hashlib
import hmac
import json
import random
from pathlib import Path

IDENTITY_BYTES = b"identity"[::-1]  # little-endian byte order
SRES_SLICE = slice(4, 8)


def h(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha256).digest()


def sres_activation(key: bytes, rand_a: bytes, rand_t: bytes, tile_id: bytes) -> bytes:
    return h(key, rand_a + rand_t + tile_id)[SRES_SLICE]


def auth_key(key: bytes, sres_t: bytes) -> bytes:
    return h(key, sres_t)[:16]


def sres_session(key: bytes, rand_a: bytes, rand_t: bytes) -> bytes:
    return h(key, rand_a.ljust(16, b"\x00") + rand_t.ljust(16, b"\x00"))[SRES_SLICE]


def private_id_seed(key: bytes, tile_id: bytes) -> bytes:
    return h(key, (tile_id + IDENTITY_BYTES).ljust(32, b"\x00"))


def private_id(seed: bytes, ctr: int) -> bytes:
    return h(seed, ctr.to_bytes(4, "little"))[:8]


def tag_key(key: bytes, rand_a: bytes, channel_data: bytes, channel_prefix: bytes,
            toa_token: bytes) -> bytes:
    return h(key, rand_a + channel_data + channel_prefix + toa_token)[:16]


def mac_message(key: bytes, ctr_a: int, msg: bytes) -> bytes:
    seed = ctr_a.to_bytes(2, "little") + b"\x01" + len(msg).to_bytes(1, "little") + msg
    return h(key, seed)[:4]


def main() -> None:
    rng = random.Random(0x7115)
    rb = lambda n: rng.randbytes(n)
    records = []

    def add(derivation: str, inputs: dict, output: bytes) -> None:
        encoded = {k: (v.hex() if isinstance(v, bytes) else v) for k, v in inputs.items()}
        records.append({"derivation": derivation, "inputs": encoded, "output": output.hex()})

    fixed = [
        (b"\x00" * 16, b"\x01" * 14, b"\x02" * 10, b"\x03" * 8),
        (b"\x00" * 16, b"\x00" * 14, b"\x00" * 10, b"\x00" * 8),
    ]
    for key, rand_a, rand_t, tile_id in fixed + [
        (rb(16), rb(14), rb(10), rb(8)) for _ in range(4)
    ]:
        add("sres_activation", {"key": key, "rand_a": rand_a, "rand_t": rand_t,
                                "tile_id": tile_id},
            sres_activation(key, rand_a, rand_t, tile_id))

    for key, sres_t in [(b"\x00" * 16, bytes.fromhex("deadbeef")),
                        (b"\x00" * 16, b"\x00" * 4)] + [(rb(16), rb(4)) for _ in range(4)]:
        add("auth_key", {"key": key, "sres_t": sres_t}, auth_key(key, sres_t))

    for key, rand_a, rand_t in [(b"\xaa" * 16, b"\x00" * 14, b"\xff" * 10)] + [
        (rb(16), rb(14), rb(10)) for _ in range(5)
    ]:
        add("sres_session", {"key": key, "rand_a": rand_a, "rand_t": rand_t},
            sres_session(key, rand_a, rand_t))

    for key, tile_id in [(b"\x00" * 16, b"\x00" * 8)] + [(rb(16), rb(8)) for _ in range(5)]:
        add("private_id_seed", {"key": key, "tile_id": tile_id}, private_id_seed(key, tile_id))

    for seed, ctr in [(b"\x00" * 32, 0), (b"\x00" * 32, 8639)] + [
        (rb(32), rng.randrange(8640)) for _ in range(4)
    ]:
        add("private_id", {"seed": seed, "ctr": ctr}, private_id(seed, ctr))

    for key, rand_a, cd, cp, token in [
        (b"\x00" * 16, b"\x00" * 14, b"\x00" * 2, b"\x00" * 1, b"\x00" * 4)
    ] + [(rb(16), rb(14), rb(2), rb(1), rb(4)) for _ in range(5)]:
        add("tag_key", {"key": key, "rand_a": rand_a, "channel_data": cd,
                        "channel_prefix": cp, "toa_token": token},
            tag_key(key, rand_a, cd, cp, token))

    for key, ctr_a, msg in [(b"\x00" * 16, 0, bytes([0x12, 0x13])),
                            (b"\x00" * 16, 1, bytes([0x12, 0x13]))] + [
        (rb(16), rng.randrange(65536), rb(rng.randrange(1, 40))) for _ in range(4)
    ]:
        add("mac_message", {"key": key, "ctr_a": ctr_a, "msg": msg},
            mac_message(key, ctr_a, msg))

    out_path = Path(__file__).resolve().parent.parent / "fixtures" / "golden_vectors.json"
    out_path.write_text(json.dumps(records, indent=2) + "\n")
    print(f"wrote {len(records)} vectors to {out_path}")


if __name__ == "__main__":
    main()
