"""求解器钩子接口：进度打印、运行报告等可扩展回调"""
import json
import os
import sys
import threading
import time
from typing import Any, Dict, List, Optional, Protocol, TextIO


class ISolverHooks(Protocol):
    """
    求解器钩子接口：定义一次 solve 执行过程中的所有回调点
    """

    def on_solve_start(self, run_id: str, info: Dict[str, Any]) -> None:
        """求解开始时调用（info 含 m, n, P, Q, step 等）"""
        ...

    def on_epoch(self, run_id: str, epoch: int, objective: float, gap: float) -> None:
        """每个 epoch 结束、记录轨迹后调用"""
        ...

    def on_solve_end(self, run_id: str, success: bool, error: Optional[Exception] = None) -> None:
        """求解结束时调用（无论成败）"""
        ...


class CompositeSolverHooks(ISolverHooks):
    """组合钩子分发器"""
    def __init__(self, hooks: List[ISolverHooks]):
        self.hooks = [h for h in hooks if h is not None]

    def on_solve_start(self, run_id, info):
        for h in self.hooks:
            if hasattr(h, 'on_solve_start'): h.on_solve_start(run_id, info)

    def on_epoch(self, run_id, epoch, objective, gap):
        for h in self.hooks:
            if hasattr(h, 'on_epoch'): h.on_epoch(run_id, epoch, objective, gap)

    def on_solve_end(self, run_id, success, error=None):
        for h in self.hooks:
            if hasattr(h, 'on_solve_end'): h.on_solve_end(run_id, success, error)


class SolverHooksAdapter:
    """适配器：钩子可缺省，求解器内部只与适配器打交道"""
    def __init__(self, hooks: Optional[ISolverHooks] = None):
        self._hooks = hooks

    def on_solve_start(self, rid, info):
        if self._hooks and hasattr(self._hooks, 'on_solve_start'):
            self._hooks.on_solve_start(rid, info)

    def on_epoch(self, rid, epoch, obj, gap):
        if self._hooks and hasattr(self._hooks, 'on_epoch'):
            self._hooks.on_epoch(rid, epoch, obj, gap)

    def on_solve_end(self, rid, ok, err=None):
        if self._hooks and hasattr(self._hooks, 'on_solve_end'):
            self._hooks.on_solve_end(rid, ok, err)


class StderrProgressHooks:
    """每 log_every 个 epoch 向标准错误打印一行 `epoch=<e> obj=<v> gap=<g>`；log_every = 0 时静默"""
    def __init__(self, log_every: int = 10, stream: Optional[TextIO] = None):
        self.log_every = log_every
        self._stream = stream

    def on_epoch(self, rid, epoch, obj, gap):
        if self.log_every <= 0 or epoch % self.log_every != 0:
            return
        stream = self._stream or sys.stderr
        print(f"epoch={epoch} obj={obj:.10g} gap={gap:.3e}", file=stream)


class JsonFileReportHooks:
    """运行结束时把摘要写入 <base_dir>/<run_id>/run.json"""
    def __init__(self, base_dir: str = "tmp"):
        self.base_dir = base_dir
        self._runs: Dict[str, Dict[str, Any]] = {}
        self._lock = threading.Lock()

    def on_solve_start(self, rid, info):
        with self._lock:
            self._runs[rid] = {"info": dict(info), "start": time.time(), "last_epoch": 0,
                               "last_objective": None, "last_gap": None}

    def on_epoch(self, rid, epoch, obj, gap):
        with self._lock:
            run = self._runs.setdefault(rid, {"info": {}, "start": time.time()})
            run.update(last_epoch=epoch, last_objective=obj, last_gap=gap)

    def on_solve_end(self, rid, ok, err=None):
        with self._lock:
            run = self._runs.pop(rid, {"info": {}, "start": time.time()})
        duration = time.time() - run["start"]
        report = {
            "run_id": rid,
            "status": "completed" if ok else "failed",
            "error": str(err) if err else None,
            "duration": f"{duration:.2f}s",
            "info": run.get("info", {}),
            "last_epoch": run.get("last_epoch", 0),
            "last_objective": run.get("last_objective"),
            "last_gap": run.get("last_gap"),
        }
        path = os.path.join(self.base_dir, rid, "run.json")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, ensure_ascii=False)
