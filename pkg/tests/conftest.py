# keeps tests/ importable so the shared oracle helpers in oracles.py resolve
