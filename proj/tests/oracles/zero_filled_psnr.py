"""Independent reference for the undersample -> zero-filled pipeline.
Reads the phantom slice and mask containers produced by the library
(inputs are shared; the FFT/mask/PSNR math here is numpy-only) and prints
the zero-filled PSNR, which is frozen into the C++ test suite.

Fixture provenance: ellipses phantom, count 1, seed 11, 128x128, test
split; mask 128x128, acceleration 4, center fraction 0.08, sigma 0.25,
lines-1d, seed 7.
"""

import json
import sys

import numpy as np


def read_cimg(path):
    with open(path, "rb") as f:
        magic = f.read(5)
        assert magic == b"CIMG1", magic
        header = json.loads(f.readline())
        h, w = header["height"], header["width"]
        if header["dtype"] == "f32":
            data = np.frombuffer(f.read(), dtype="<f4")
            real = data[: h * w].reshape(h, w).astype(np.float64)
            imag = data[h * w :].reshape(h, w).astype(np.float64)
            return real + 1j * imag, header
        data = np.frombuffer(f.read(), dtype=np.uint8)
        return data[: h * w].reshape(h, w).astype(bool), header


def fft2c(a):
    return np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(a), norm="ortho"))


def ifft2c(a):
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(a), norm="ortho"))


def psnr(ref, test):
    peak = ref.max()
    mse = np.mean((ref - test) ** 2)
    return 10.0 * np.log10(peak * peak / mse)


def main():
    gt, _ = read_cimg(sys.argv[1] if len(sys.argv) > 1 else "/tmp/oracle_phantom.cimg")
    mask, mh = read_cimg(sys.argv[2] if len(sys.argv) > 2 else "/tmp/oracle_mask.cimg")
    ksp = fft2c(gt) * mask
    zf = ifft2c(ksp)
    value = psnr(np.abs(gt), np.abs(zf))
    print(f"sampled entries: {int(mask.sum())} of {mask.size}")
    print(f"zero-filled PSNR: {value:.9f} dB")


if __name__ == "__main__":
    main()
