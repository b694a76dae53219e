# Adapted from https://chatgpt.com/share/6650a1c2-7d3e-8001-9f2a-0b1c2d3e4f31
def f():
    return 1
