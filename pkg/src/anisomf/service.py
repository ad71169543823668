"""HTTP service exposing the analysis pipeline.

Images travel as JSON row-major nested lists; endpoints mirror the CLI
subcommands so the package can back a long-running analysis service.  Run
with `uvicorn anisomf.service:app` or `python -m anisomf.service`.
"""

from typing import List, Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .anisotropy import FA_CUTOFF_DEFAULT
from .engine import FUNCTIONALS, threshold_image
from .morphometry import (count_cells, euler_oracle, minkowski_functionals,
                          perimeter_oracle)
from .phantoms import CohortSpec, PhantomSpec, make_phantom
from .pipeline import AMF_BUNDLES, AnalysisConfig, analyze_image, synthetic_cohort
from .regression import CvConfig, compare_feature_sets, cross_validate

app = FastAPI(title="anisomf", version="0.1.0")


class AnalysisOptions(BaseModel):
    kernel_size: int = 5
    sigma_major: float = 2.0
    sigma_minor: float = 0.5
    n_thresholds: int = 10
    thresholds: Optional[List[float]] = None
    fa_cutoff: float = FA_CUTOFF_DEFAULT
    fa_bins: int = 50
    direction_bins: int = 18

    def to_config(self) -> AnalysisConfig:
        return AnalysisConfig(
            kernel_size=self.kernel_size, sigma_major=self.sigma_major,
            sigma_minor=self.sigma_minor, n_thresholds=self.n_thresholds,
            thresholds=tuple(self.thresholds) if self.thresholds else None,
            fa_cutoff=self.fa_cutoff, fa_bins=self.fa_bins,
            direction_bins=self.direction_bins)


class MfRequest(BaseModel):
    pixels: List[List[float]]
    threshold: float = 1.0


class MfResponse(BaseModel):
    n_s: int
    n_e: int
    n_v: int
    area: int
    perimeter: int
    euler: int
    euler_oracle: int
    perimeter_oracle: int
    oracle_match: bool


class AnalyzeRequest(BaseModel):
    pixels: List[List[float]]
    mask: Optional[List[List[bool]]] = None
    functional: str = "area"
    options: AnalysisOptions = Field(default_factory=AnalysisOptions)


class HistogramModel(BaseModel):
    bin_edges: List[float]
    counts: List[int]
    frequencies: List[float]


class AnalyzeResponse(BaseModel):
    functional: str
    thresholds: List[float]
    fa_map: List[List[float]]
    angle_map: List[List[Optional[float]]]
    near_isotropic_fraction: float
    oriented_pixels: int
    fa_histogram: HistogramModel
    direction_histogram: HistogramModel


class PhantomRequest(BaseModel):
    kind: str
    width: int = 256
    height: int = 256
    angle: float = 0.0
    period: float = 8.0
    contrast: float = 100.0
    noise_sigma: float = 0.0
    seed: int = 0


class PhantomResponse(BaseModel):
    pixels: List[List[float]]


class RegressRequest(BaseModel):
    n_specimens: int = 60
    seed: int = 0
    repetitions: int = 100
    train_fraction: float = 2.0 / 3.0


class BundleSummary(BaseModel):
    bundle: str
    median_rmse: float
    q25: float
    q75: float
    wilcoxon_p_vs_baseline: Optional[float] = None


class RegressResponse(BaseModel):
    baseline: str
    summaries: List[BundleSummary]
    best_bundle: str


def _domain(call):
    try:
        return call()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/mf", response_model=MfResponse)
def mf(req: MfRequest):
    def run():
        binary = threshold_image(np.asarray(req.pixels), req.threshold)
        c = count_cells(binary)
        m = minkowski_functionals(c)
        eo = euler_oracle(binary)
        po = perimeter_oracle(binary)
        return MfResponse(
            n_s=c.n_s, n_e=c.n_e, n_v=c.n_v, area=m.area,
            perimeter=m.perimeter, euler=m.euler, euler_oracle=eo,
            perimeter_oracle=po,
            oracle_match=(m.euler == eo and m.perimeter == po))
    return _domain(run)


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest):
    if req.functional not in FUNCTIONALS:
        raise HTTPException(422, f"unknown functional {req.functional!r}")

    def run():
        mask = np.asarray(req.mask, dtype=bool) if req.mask is not None else None
        res = analyze_image(np.asarray(req.pixels, dtype=float),
                            req.options.to_config(), mask=mask)
        maps = res.maps[req.functional]
        angle = [[None if not np.isfinite(a) else float(a) for a in row]
                 for row in maps.angle_map]
        fh = res.fa_hist[req.functional]
        dh = res.direction_hist[req.functional]
        return AnalyzeResponse(
            functional=req.functional,
            thresholds=list(res.thresholds),
            fa_map=maps.fa_map.tolist(),
            angle_map=angle,
            near_isotropic_fraction=res.near_isotropic[req.functional],
            oriented_pixels=int(maps.oriented.sum()),
            fa_histogram=HistogramModel(
                bin_edges=fh.bin_edges.tolist(), counts=fh.counts.tolist(),
                frequencies=fh.frequencies.tolist()),
            direction_histogram=HistogramModel(
                bin_edges=dh.bin_edges.tolist(), counts=dh.counts.tolist(),
                frequencies=dh.frequencies.tolist()))
    return _domain(run)


@app.post("/phantom", response_model=PhantomResponse)
def phantom(req: PhantomRequest):
    def run():
        spec = PhantomSpec(width=req.width, height=req.height, kind=req.kind,
                           angle=req.angle, period=req.period,
                           contrast=req.contrast, noise_sigma=req.noise_sigma,
                           seed=req.seed)
        return PhantomResponse(pixels=make_phantom(spec).tolist())
    return _domain(run)


@app.post("/regress", response_model=RegressResponse)
def regress(req: RegressRequest):
    def run():
        records = synthetic_cohort(CohortSpec(n_specimens=req.n_specimens,
                                              seed=req.seed))
        cfg = CvConfig(train_fraction=req.train_fraction,
                       repetitions=req.repetitions, seed=req.seed)
        names = ["bmd", *AMF_BUNDLES, "iso-mf"]
        dists = {b: cross_validate(records, b, cfg) for b in names}
        summaries = []
        for b in names:
            q25, med, q75 = np.percentile(dists[b], [25, 50, 75])
            p = (compare_feature_sets(records, b, "bmd", cfg).p_value
                 if b != "bmd" else None)
            summaries.append(BundleSummary(bundle=b, median_rmse=float(med),
                                           q25=float(q25), q75=float(q75),
                                           wilcoxon_p_vs_baseline=p))
        best = min((b for b in names if b != "bmd"),
                   key=lambda b: np.median(dists[b]))
        return RegressResponse(baseline="bmd", summaries=summaries,
                               best_bundle=best)
    return _domain(run)


def main():
    import uvicorn
    uvicorn.run(app, host="127.0.0.1", port=8000)


if __name__ == "__main__":
    main()
