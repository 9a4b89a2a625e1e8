import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from acoufilt.network import LadderStage, LadderTopology, Placement, one_port_sweep
from acoufilt.resonator import MotionalBranch, ResonatorModel, resonance_frequencies
from acoufilt.service import app
from acoufilt.service.schemas import TopologyModel
from acoufilt.touchstone import read_touchstone, write_touchstone


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


FLAGSHIP_REQUEST = {
    "table": {"builtin": "sh0"},
    "geometry": {
        "lambda_m": 5.0e-6,
        "pairs_n": 100,
        "aperture_w_m": 20e-6,
        "eps_eff_f_per_m": 5e-10,
        "q_assumed": 3680.0,
    },
}


class TestBasics:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"

    def test_presets(self, client):
        body = client.get("/presets").json()
        assert len(body) == 8
        assert body[0]["fc_target_hz"] == pytest.approx(1.4e9)
        assert body[-1]["fbw_target"] == pytest.approx(0.133)


class TestDispersion:
    def test_builtin_anchor(self, client):
        r = client.post(
            "/dispersion/query", json={"table": {"builtin": "s0"}, "lambda_m": 1.8e-6}
        )
        assert r.status_code == 200
        body = r.json()
        assert body["frequency_hz"] == pytest.approx(3.70e9, rel=1e-9)
        assert body["vp_mps"] == pytest.approx(6660.0)

    def test_inline_table(self, client):
        samples = [[0.1, 6000.0, 0.2], [0.2, 6000.0, 0.2], [0.3, 6000.0, 0.2], [0.4, 6000.0, 0.2]]
        r = client.post(
            "/dispersion/query",
            json={"table": {"mode": "S0", "samples": samples}, "lambda_m": 2.25e-6},
        )
        assert r.status_code == 200
        assert r.json()["vp_mps"] == pytest.approx(6000.0)

    def test_out_of_domain_maps_to_422_with_category(self, client):
        r = client.post(
            "/dispersion/query", json={"table": {"builtin": "s0"}, "lambda_m": 1e-4}
        )
        assert r.status_code == 422
        assert r.json()["category"] == "range"


class TestResonatorDerive:
    def test_flagship_derivation(self, client):
        req = dict(FLAGSHIP_REQUEST)
        req["grid"] = {"start_hz": 1.446e9, "stop_hz": 1.454e9, "points": 501}
        r = client.post("/resonator/derive", json=req)
        assert r.status_code == 200
        body = r.json()
        assert body["fr_hz"] == pytest.approx(1.45e9, rel=1e-9)
        assert body["k2"] == pytest.approx(0.0867, rel=1e-9)
        assert body["q_analytic"] == pytest.approx(3680.0, rel=1e-9)
        assert body["regime"] == "SED"
        sweep = read_touchstone(body["touchstone_s1p"])
        assert sweep.ports == 1 and sweep.grid.size == 501

    def test_spur_toggles(self, client):
        req = dict(FLAGSHIP_REQUEST)
        req["spurs"] = {
            "transverse": {"enabled": True, "piston": True},
            "leaky": {"enabled": True, "pr_over_pi": 0.9},
            "overtone": {"enabled": True, "embedded_idt": True},
        }
        body = client.post("/resonator/derive", json=req).json()
        labels = [b["label"] for b in body["model"]["spurs"]]
        assert labels == ["transverse:1", "transverse:3", "transverse:5"]


class TestFilterAndSynth:
    def ladder_json(self):
        stages = []
        for k, fr in enumerate([2.0e9, 2.0e9 / 1.05] * 2):
            cm = 0.2e-12
            lm = 1 / ((2 * math.pi * fr) ** 2 * cm)
            model = ResonatorModel(
                c0=2e-12, main=MotionalBranch(rm=math.sqrt(lm / cm) / 2000, lm=lm, cm=cm)
            )
            stages.append(
                LadderStage(Placement.SERIES if k % 2 == 0 else Placement.SHUNT, model)
            )
        return TopologyModel.from_core(LadderTopology(tuple(stages))).model_dump()

    def test_filter_simulate(self, client):
        r = client.post(
            "/filter/simulate",
            json={
                "topology": self.ladder_json(),
                "grid": {"start_hz": 1.7e9, "stop_hz": 2.3e9, "points": 1001},
                "band": [1.94e9, 2.1e9],
            },
        )
        assert r.status_code == 200
        body = r.json()
        assert 1.8e9 < body["metrics"]["fc_hz"] < 2.2e9
        assert read_touchstone(body["touchstone_s2p"]).ports == 2

    def test_synth_run(self, client):
        r = client.post(
            "/synth/run",
            json={
                "design": {
                    "fc_target_hz": 1.45e9,
                    "fbw_target": 0.04,
                    "il_max_db": 2.5,
                    "q_assumed": 3000.0,
                },
                "tables": [{"builtin": "sh0"}, {"builtin": "s0"}],
            },
        )
        assert r.status_code == 200
        body = r.json()
        assert abs(body["fc_error_rel"]) < 0.01
        assert abs(body["fbw_error_rel"]) < 0.10
        assert body["mode"] == "SH0"
        assert body["converged"] is True
        topology = TopologyModel(**body["topology"]).to_core()
        assert len(topology.stages) == 4

    def test_infeasible_synth_maps_to_422(self, client):
        r = client.post(
            "/synth/run",
            json={
                "design": {
                    "fc_target_hz": 1.45e9,
                    "fbw_target": 0.12,
                    "il_max_db": 2.5,
                    "q_assumed": 3000.0,
                },
                "tables": [{"builtin": "sh0"}],
            },
        )
        assert r.status_code == 422
        assert r.json()["category"] == "feasibility"


class TestAnalysisEndpoints:
    def flagship_s1p(self):
        model = ResonatorModel(
            c0=1e-12,
            main=MotionalBranch(rm=912.8709291752769 / 3680.0, lm=1e-7, cm=0.12e-12),
        )
        fr, fa = resonance_frequencies(model)
        half = 10.0 / 3680.0
        grid = np.linspace(fr * (1 - half), fr * (1 + half), 2001)
        return write_touchstone(one_port_sweep(model, grid)), model, fr, fa

    def test_bode_q(self, client):
        text, model, fr, _ = self.flagship_s1p()
        r = client.post("/analyze/bode-q", json={"touchstone": text})
        assert r.status_code == 200
        body = r.json()
        assert body["qmax"] == pytest.approx(3680.0, rel=0.02)
        assert len(body["q"]) == 2001

    def test_filter_metrics_endpoint(self, client):
        grid = np.linspace(3.0e9, 4.6e9, 801)
        mag = np.where((grid >= 3.558e9) & (grid <= 4.046e9), 1.0, 1e-8)
        mag[grid == 3.558e9] = mag[grid == 4.046e9] = 10 ** (-3 / 20)
        data = np.zeros((grid.size, 2, 2), complex)
        data[:, 1, 0] = data[:, 0, 1] = mag
        from acoufilt.network import SParameterSet

        text = write_touchstone(SParameterSet(grid, data))
        r = client.post("/analyze/filter-metrics", json={"touchstone": text})
        assert r.status_code == 200
        assert r.json()["bw3db_hz"] == pytest.approx(488e6, rel=1e-9)

    def test_fit_endpoint(self, client):
        model = ResonatorModel(
            c0=1e-12, main=MotionalBranch(rm=0.25, lm=1e-7, cm=0.12e-12), rs=0.3, r0=2.0
        )
        fr, fa = resonance_frequencies(model)
        grid = np.linspace(fr * 0.9, fa * 1.1, 1501)
        text = write_touchstone(one_port_sweep(model, grid))
        r = client.post("/fit/mbvd", json={"touchstone": text})
        assert r.status_code == 200
        body = r.json()
        assert body["converged"] is True
        assert body["model"]["main"]["lm"] == pytest.approx(1e-7, rel=1e-3)
        assert body["model"]["rs"] == pytest.approx(0.3, rel=1e-3)

    def test_delay_line_endpoint(self, client):
        runs = [[g, math.exp(-2 * math.pi * 0.002 * g)] for g in (50, 100, 200)]
        r = client.post("/fit/delay-line-loss", json={"runs": runs})
        assert r.status_code == 200
        assert r.json()["delta"] == pytest.approx(0.002, abs=1e-12)

    def test_parse_error_maps_to_422(self, client):
        r = client.post("/analyze/bode-q", json={"touchstone": "# GHz S RI R 50\n2 0 0\n1 0 0\n"})
        assert r.status_code == 422
        assert r.json()["category"] == "parse"
