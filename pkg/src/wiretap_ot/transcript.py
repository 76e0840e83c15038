"""Public-channel transcript and its canonical wire format.

Every message is ``{step, sender, payload_hex}``. Payload encodings are
length-prefixed big-endian: index sets are a u32 count followed by sorted u32
indices, bit strings a u32 bit length followed by packed bits (MSB first).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

ALICE = "Alice"
BOB = "Bob"
ABORT_PAYLOAD = b"ABORT"


@dataclass(frozen=True)
class Message:
    step: int
    sender: str
    payload: bytes

    def to_dict(self) -> dict:
        return {"step": self.step, "sender": self.sender, "payload_hex": self.payload.hex()}


@dataclass
class Transcript:
    """Append-only list of public messages."""

    messages: list[Message] = field(default_factory=list)

    def append(self, sender: str, payload: bytes) -> Message:
        if sender not in (ALICE, BOB):
            raise ValueError(f"unknown sender {sender!r}")
        msg = Message(len(self.messages), sender, bytes(payload))
        self.messages.append(msg)
        return msg

    def __len__(self) -> int:
        return len(self.messages)

    def __iter__(self):
        return iter(self.messages)

    def __getitem__(self, i: int) -> Message:
        return self.messages[i]

    def to_list(self) -> list[dict]:
        return [m.to_dict() for m in self.messages]

    def to_json(self) -> str:
        return json.dumps(self.to_list(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_list(cls, items: list[dict]) -> "Transcript":
        out = cls()
        for expected, item in enumerate(items):
            if int(item["step"]) != expected:
                raise ValueError(f"transcript step {item['step']} out of order")
            out.append(item["sender"], bytes.fromhex(item["payload_hex"]))
        return out

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        return cls.from_list(json.loads(text))


def encode_index_set(indices: np.ndarray) -> bytes:
    idx = np.sort(np.asarray(indices, dtype=np.int64))
    return struct.pack(">I", idx.size) + idx.astype(">u4").tobytes()


def decode_index_set(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    (count,) = struct.unpack_from(">I", buf, offset)
    offset += 4
    idx = np.frombuffer(buf, dtype=">u4", count=count, offset=offset).astype(np.int64)
    return idx, offset + 4 * count


def encode_bits(bits: np.ndarray) -> bytes:
    bits = np.asarray(bits, dtype=np.uint8)
    return struct.pack(">I", bits.size) + np.packbits(bits).tobytes()


def decode_bits(buf: bytes, offset: int = 0) -> tuple[np.ndarray, int]:
    (length,) = struct.unpack_from(">I", buf, offset)
    offset += 4
    nbytes = (length + 7) // 8
    packed = np.frombuffer(buf, dtype=np.uint8, count=nbytes, offset=offset)
    return np.unpackbits(packed, count=length), offset + nbytes


def encode_ordered_sets(sets: tuple[np.ndarray, ...]) -> bytes:
    return b"".join(encode_index_set(s) for s in sets)


def decode_ordered_sets(buf: bytes) -> tuple[np.ndarray, ...]:
    out, offset = [], 0
    for _ in range(4):
        idx, offset = decode_index_set(buf, offset)
        out.append(idx)
    if offset != len(buf):
        raise ValueError("trailing bytes after ordered sets")
    return tuple(out)


HEADER_FORMAT = ">IIIIQQ"


def encode_public_header(n: int, m: int, s: int, k: int, code_seed: int, hash_seed: int) -> bytes:
    return struct.pack(HEADER_FORMAT, n, m, s, k, code_seed, hash_seed)


def decode_public_header(buf: bytes) -> dict:
    n, m, s, k, code_seed, hash_seed = struct.unpack(HEADER_FORMAT, buf)
    return {"n": n, "m": m, "s": s, "k": k, "code_seed": code_seed, "hash_seed": hash_seed}
