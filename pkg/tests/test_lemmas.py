import math

import mock
import pytest

from hyperpen import lemmas
from hyperpen.exceptions import SamplingError, UnknownLemmaError
from hyperpen.utils import Rejected

NAMED = sorted(i for i in lemmas.lemma_ids() if i.startswith("L"))
PROPERTIES = sorted(i for i in lemmas.lemma_ids() if i.startswith(("pen:", "lip:", "cont:")))


class TestRegistry:
    def test_named_lemmas_present(self):
        for lemma_id in ["L2.1", "L2.2", "L2.5", "L2.6", "L2.7", "L2.8", "L3.2", "L3.3", "L3.4", "L4.2"]:
            assert lemma_id in lemmas.REGISTRY

    def test_property_table(self):
        assert "pen:horoball:ph" in lemmas.REGISTRY
        assert "cont:tube:length" in lemmas.REGISTRY
        assert "pen:tube:crp" in lemmas.REGISTRY
        assert "lip:ball:length" in lemmas.REGISTRY

    @pytest.mark.parametrize("alias", ["L2.1", "l2.1", "L2_1", "l2_1"])
    def test_normalize(self, alias):
        assert lemmas.normalize_id(alias) == "L2.1"
        assert lemmas.get_lemma(alias).lemma_id == "L2.1"

    def test_unknown(self):
        with pytest.raises(UnknownLemmaError) as exc_info:
            lemmas.check_inequality("L9.9", 10, 0)
        assert exc_info.value.lemma_id == "L9.9"

    def test_register(self):
        with mock.patch.dict(lemmas.REGISTRY, clear=False):

            @lemmas.register("T0.1", "1 <= 2")
            def _trivial(rng, dim):
                return [(1.0, 2.0)]

            report = lemmas.check_inequality("T0.1", 5, 0)
            assert report.violations == 0
            assert report.samples == 5
            assert report.worst_margin == 1.0
        assert "T0.1" not in lemmas.REGISTRY


class TestCheckInequality:
    @pytest.mark.parametrize("lemma_id", NAMED)
    def test_named_hold(self, lemma_id):
        report = lemmas.check_inequality(lemma_id, trials=30, seed=7)
        assert report.violations == 0
        assert report.samples >= 30

    @pytest.mark.parametrize("lemma_id", PROPERTIES)
    def test_properties_hold(self, lemma_id):
        assert lemmas.check_inequality(lemma_id, trials=30, seed=11).violations == 0

    def test_horoball_heights_from_interior_sources(self):
        # half of the draws issue from points inside the space
        assert lemmas.check_inequality("L3.3", trials=500, seed=7).violations == 0

    @pytest.mark.slow
    @pytest.mark.parametrize("lemma_id", lemmas.lemma_ids())
    def test_volume(self, lemma_id):
        report = lemmas.check_inequality(lemma_id, trials=2000, seed=7)
        assert report.violations == 0

    @pytest.mark.parametrize("lemma_id", ["L2.1", "L2.5", "L3.3"])
    def test_planar(self, lemma_id):
        assert lemmas.check_inequality(lemma_id, trials=30, seed=3, dim=2).violations == 0

    def test_reproducible(self):
        a = lemmas.check_inequality("L2.1", trials=20, seed=5)
        b = lemmas.check_inequality("L2.1", trials=20, seed=5)
        assert a == b

    def test_violation_counted(self):
        with mock.patch.dict(lemmas.REGISTRY, clear=False):

            @lemmas.register("T0.2", "3 <= 2")
            def _false(rng, dim):
                return [(3.0, 2.0), (0.0, 2.0)]

            report = lemmas.check_inequality("T0.2", 4, 0)
        assert report.violations == 4
        assert report.worst_margin == -1.0

    def test_report_as_dict(self):
        d = lemmas.check_inequality("L2.1", trials=3, seed=1).as_dict()
        assert {"lemma", "trials", "violations", "worst_margin", "seed"} <= set(d)
        assert math.isfinite(d["worst_margin"])

    def test_rejection_budget(self):
        with mock.patch.dict(lemmas.REGISTRY, clear=False):
            lemmas.REGISTRY["T0.3"] = lemmas.Lemma(
                "T0.3", "never admissible", lemmas.rejection_sample(exc=Rejected, tries=3)(_always_rejected)
            )
            with pytest.raises(SamplingError) as exc_info:
                lemmas.check_inequality("T0.3", 1, 0)
        assert exc_info.value.attempts == 3


def _always_rejected(rng, dim):
    raise Rejected()
