#!/usr/bin/env python3
# sentinel: differential bug detection for WebAssembly runtimes
# Copyright 2026 The Sentinel Authors.
# SPDX-License-Identifier: Apache-2.0
#
# Fake runtime for adapter tests. The first argument picks the behaviour:
#
#   --version            print a version banner
#   exit N MODULE        write to stderr, exit N
#   signal MODULE        die by SIGSEGV
#   hang MODULE          fork a sleeping grandchild (pid in ./child.pid), then spin
#   echo MODULE ARGS...  print argv and the module size, exit 0
#   nosimd MODULE        reject any module containing the 0xFD prefix
#   print TEXT MODULE    print TEXT, exit 0
#   compile IN OUT       copy IN to OUT

import os
import shutil
import signal
import sys
import time


def main(argv):
    if not argv or argv[0] == "--version":
        print(os.environ.get("STUB_BANNER", "stubwasm 1.2.3"))
        return 0
    what = argv[0]
    if what == "exit":
        sys.stderr.write("stub failing with %s\n" % argv[1])
        return int(argv[1])
    if what == "signal":
        sys.stdout.flush()
        os.kill(os.getpid(), signal.SIGSEGV)
        return 0
    if what == "hang":
        pid = os.fork()
        if pid == 0:
            os.execvp("sleep", ["sleep", "1000"])
        with open("child.pid", "w") as f:
            f.write(str(pid))
        while True:
            time.sleep(0.05)
    if what == "echo":
        with open(argv[1], "rb") as f:
            size = len(f.read())
        print(" ".join(argv[1:]))
        print("module bytes:", size)
        return 0
    if what == "nosimd":
        with open(argv[1], "rb") as f:
            if b"\xfd" in f.read():
                sys.stderr.write("error: SIMD support is not enabled\n")
                return 1
        return 0
    if what == "print":
        print(argv[1])
        return 0
    if what == "compile":
        shutil.copyfile(argv[1], argv[2])
        return 0
    sys.stderr.write("unknown behaviour " + what + "\n")
    return 64


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
