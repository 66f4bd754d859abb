#!/usr/bin/env python3
"""Independent big-integer reference for the keyed primitives.

Prints the frozen constants asserted by tests/test_msgcodec.cpp. Uses
Python integers reduced mod 2**64 rather than the C++ implementation.
"""

M = (1 << 64) - 1


def mix64(z):
    z &= M
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & M
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & M
    z ^= z >> 31
    return z


def stream(seed, n):
    return [mix64(seed + (i + 1) * 0x9E3779B97F4A7C15) for i in range(n)]


def stream_bytes(seed, n):
    out = bytearray()
    i = 0
    while len(out) < n:
        w = mix64(seed + (i + 1) * 0x9E3779B97F4A7C15)
        out += w.to_bytes(8, "little")
        i += 1
    return bytes(out[:n])


def digest(key, data):
    s = mix64(key ^ 0x517CC1B727220A95)
    for b in data:
        s = mix64(s ^ b)
    return mix64(s ^ len(data))


def schedule(secret, password):
    k0 = digest(0, secret)
    kp = digest(k0, password)
    return kp, {t: digest(kp, t.encode()) for t in ("PERM", "ENC1", "ENC2", "POS", "FEAT")}


def sbox(seed):
    box = list(range(256))
    words = stream(seed, 255)
    for n, i in enumerate(range(255, 0, -1)):
        j = words[n] % (i + 1)
        box[i], box[j] = box[j], box[i]
    return box


if __name__ == "__main__":
    print("mix64(1)        = 0x%016X" % mix64(1))
    print("stream(0,1)     = 0x%016X" % stream(0, 1)[0])
    print("digest(0,'')    = 0x%016X" % digest(0, b""))
    kp, ks = schedule(b"k", b"p")
    print("kp(k,p)         = 0x%016X" % kp)
    for t, v in ks.items():
        print("%-15s = 0x%016X" % (t, v))
    t1 = digest(ks["FEAT"], b"")
    t2 = digest(mix64(ks["FEAT"] ^ 1), b"")
    print("tag(empty)      =", (t1.to_bytes(8, "little") + t2.to_bytes(8, "little")).hex())
    salt = bytes.fromhex("0011223344556677")
    ks1 = stream_bytes(digest(ks["ENC1"], salt), 16)
    box = sbox(digest(ks["ENC2"], salt))
    ct = bytes(box[b] for b in ks1)
    print("enc(zero16)     =", ct.hex())
    print("verifier        = 0x%016X" % digest(kp, salt))
