"""FastAPI application wrapping the core package.

Run with ``uvicorn acoufilt.service:app``.  Every endpoint is stateless and
wraps exactly one core pipeline operation; toolkit errors surface as HTTP
422 with the same machine-parseable category the CLI prints.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from .. import dispersion as disp
from .. import extraction, network, synth, touchstone
from ..errors import ToolkitError, UsageError
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="acoufilt service",
        description="multiband acoustic resonator and ladder-filter design service",
        version=__version__,
    )

    @app.exception_handler(ToolkitError)
    async def toolkit_error_handler(request: Request, err: ToolkitError):
        status = 400 if isinstance(err, UsageError) else 422
        return JSONResponse(
            status_code=status,
            content={"category": err.category, "detail": str(err)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.get("/presets", response_model=list[schemas.DesignSpecModel])
    def presets():
        return [schemas.DesignSpecModel.from_core(p) for p in synth.band_presets()]

    @app.post("/dispersion/query", response_model=schemas.DispersionQueryResponse)
    def dispersion_query(req: schemas.DispersionQueryRequest):
        consts = req.constants.to_core()
        table = req.table.to_core()
        x = consts.film_thickness_h / req.lambda_m
        vp, k2 = disp.interpolate(table, x)
        return schemas.DispersionQueryResponse(
            mode=table.mode.value,
            h_over_lambda=x,
            vp_mps=vp,
            k2=k2,
            frequency_hz=disp.frequency_for(table, consts, req.lambda_m),
            regime=disp.classify_regime(consts, req.lambda_m).value,
        )

    @app.post("/resonator/derive", response_model=schemas.ResonatorDeriveResponse)
    def resonator_derive(req: schemas.ResonatorDeriveRequest):
        consts = req.constants.to_core()
        table = req.table.to_core()
        geom = req.geometry.to_core()
        spurs = req.spurs.to_core() if req.spurs is not None else None
        model = synth.derive_resonator(table, consts, geom, spurs)
        report = extraction.resonator_report(model)
        s1p = None
        if req.grid is not None:
            sweep = network.one_port_sweep(
                model, req.grid.to_core().build(), req.reference_impedance
            )
            s1p = touchstone.write_touchstone(sweep, format=req.touchstone_format)
        return schemas.ResonatorDeriveResponse(
            model=schemas.ResonatorModelModel.from_core(model),
            fr_hz=report["fr_hz"],
            fa_hz=report["fa_hz"],
            k2=report["k2"],
            q_analytic=schemas.finite_or_none(report["q"]),
            regime=disp.classify_regime(consts, geom.wavelength).value,
            touchstone_s1p=s1p,
        )

    @app.post("/filter/simulate", response_model=schemas.FilterSimulateResponse)
    def filter_simulate(req: schemas.FilterSimulateRequest):
        topology = req.topology.to_core()
        sweep = network.cascade_sweep(topology, req.grid.to_core().build())
        metrics = network.filter_metrics(sweep, passband_hint=req.band)
        return schemas.FilterSimulateResponse(
            metrics=schemas.MetricsModel.from_core(metrics),
            touchstone_s2p=touchstone.write_touchstone(sweep, format=req.touchstone_format),
        )

    @app.post("/synth/run", response_model=schemas.SynthesizeResponse)
    def synth_run(req: schemas.SynthesizeRequest):
        spec = req.design.to_core()
        tables = [t.to_core() for t in req.tables]
        result = synth.ladder_synthesize(
            spec, tables, req.constants.to_core(), seed=req.seed
        )
        m = result.metrics
        return schemas.SynthesizeResponse(
            topology=schemas.TopologyModel.from_core(result.topology),
            metrics=schemas.MetricsModel.from_core(m),
            mode=result.mode.value,
            converged=result.converged,
            evaluations=result.evaluations,
            fc_error_rel=(m.fc - spec.fc_target) / spec.fc_target,
            fbw_error_rel=(m.fbw - spec.fbw_target) / spec.fbw_target,
            series_lambda_m=result.series_wavelength,
            shunt_lambda_m=result.shunt_wavelength,
            series_c0_f=result.series_c0,
            shunt_c0_f=result.shunt_c0,
        )

    @app.post("/analyze/bode-q", response_model=schemas.BodeQResponse)
    def analyze_bode_q(req: schemas.TouchstoneRequest):
        sparams = touchstone.read_touchstone(req.touchstone)
        curve = extraction.bode_q(sparams)
        return schemas.BodeQResponse(
            qmax=curve.qmax,
            f_at_qmax_hz=curve.f_at_qmax,
            frequency_hz=[float(f) for f in curve.grid],
            q=[schemas.finite_or_none(float(q)) for q in curve.q],
        )

    @app.post("/analyze/filter-metrics", response_model=schemas.MetricsModel)
    def analyze_filter_metrics(req: schemas.TouchstoneRequest):
        sparams = touchstone.read_touchstone(req.touchstone)
        metrics = network.filter_metrics(sparams, passband_hint=req.band)
        return schemas.MetricsModel.from_core(metrics)

    @app.post("/fit/mbvd", response_model=schemas.FitResponse)
    def fit_mbvd_endpoint(req: schemas.TouchstoneRequest):
        sparams = touchstone.read_touchstone(req.touchstone)
        report = extraction.fit_mbvd(sparams)
        summary = extraction.resonator_report(report.model)
        return schemas.FitResponse(
            model=schemas.ResonatorModelModel.from_core(report.model),
            residual=report.residual,
            iterations=report.iterations,
            converged=report.converged,
            fr_hz=summary["fr_hz"],
            fa_hz=summary["fa_hz"],
            k2=summary["k2"],
            q=summary["q"],
        )

    @app.post("/fit/delay-line-loss", response_model=schemas.DelayLineFitResponse)
    def fit_delay_line(req: schemas.DelayLineFitRequest):
        dataset = extraction.DelayLineDataset(
            runs=tuple(req.runs), damping_input=req.damping_input
        )
        delta, a0 = extraction.delay_line_fit(dataset)
        return schemas.DelayLineFitResponse(delta=delta, a0=a0)

    return app


app = create_app()
