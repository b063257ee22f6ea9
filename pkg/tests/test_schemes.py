"""Starter formulas, acceleration steps, and the scheme registry."""

import numpy as np
import pytest

from colebrook import core, kernels, schemes

EQ3_PIN = 3.7421514831245        # a=8, b=1.30103
EQ4_PIN = 6.5878809877028383
EQ5_PIN = 6.6462336111690357     # a=5, b=3
EQ6_PIN = 5.09129209915634       # a=6, b=2
EQ3_DISPLAY = 4.70               # a=4, b=2 lands on a round value

CHAIN_X1 = 7.3253335998557053    # Re=1e5, eps/D=1e-4, eq2 start
CHAIN_X2 = 7.3521761708391499
EQ3_CHAIN_X0 = 7.528
EQ3_CHAIN_X1 = 7.3314666429513583
TRANSFORMED_PUB_X1 = 7.3253105395888885

REQUIRED_IDS = {
    "eq2", "eq2a1", "eq2a2", "eq2a2-pade", "eq3", "eq3a",
    "eq4", "eq4a", "eq5", "eq5a", "eq6", "eq6a",
}


class TestStarters:
    def test_eq3_pin(self):
        assert schemes.starter_eq3_raw(8.0, 1.30103) == pytest.approx(EQ3_PIN, rel=1e-14)

    def test_eq3_round_value(self):
        assert schemes.starter_eq3_raw(4.0, 2.0) == pytest.approx(EQ3_DISPLAY, rel=1e-14)

    def test_eq4_pin(self):
        assert schemes.starter_eq4_raw(8.0, 1.30103) == pytest.approx(EQ4_PIN, rel=1e-14)

    def test_eq5_pin(self):
        assert schemes.starter_eq5_raw(5.0, 3.0) == pytest.approx(EQ5_PIN, rel=1e-14)

    def test_eq6_pin(self):
        assert schemes.starter_eq6_raw(6.0, 2.0) == pytest.approx(EQ6_PIN, rel=1e-14)

    def test_typed_starters_match_raw(self):
        p = core.FlowPoint(1e5, 1e-4)
        n = core.normalize(p)
        assert schemes.starter_eq3(n).x == schemes.starter_eq3_raw(n.a, n.b)
        assert schemes.starter_eq4(n).x == schemes.starter_eq4_raw(n.a, n.b)
        assert schemes.starter_eq5(n).x == schemes.starter_eq5_raw(n.a, n.b)
        assert schemes.starter_eq6(n).x == schemes.starter_eq6_raw(n.a, n.b)
        assert schemes.starter_eq2(p).x == core.starter_eq2_raw(1e5, 1e-4)

    def test_starters_are_step_zero(self):
        n = core.NormalizedPoint(5.0, 4.0)
        assert schemes.starter_eq6(n).step == 0

    def test_eq3_rejects_nonpositive_a(self):
        with pytest.raises(core.DomainError):
            schemes.starter_eq3(core.NormalizedPoint(0.0, 4.0))

    def test_sine_argument_coefficients(self):
        assert schemes.SIN_ARG_COEF == {"eq4": 0.937, "eq5": 0.935, "eq6": 0.939}


class TestAcceleration:
    def test_two_step_chain(self):
        p = core.FlowPoint(1e5, 1e-4)
        it0 = schemes.starter_eq2(p)
        it1 = schemes.accelerate(p, it0)
        it2 = schemes.accelerate(p, it1)
        assert (it1.step, it2.step) == (1, 2)
        assert it1.x == pytest.approx(CHAIN_X1, rel=1e-14)
        assert it2.x == pytest.approx(CHAIN_X2, rel=1e-14)

    def test_eq3_chain(self):
        p = core.FlowPoint(1e5, 1e-4)
        it0 = schemes.starter_eq3(core.normalize(p))
        assert it0.x == pytest.approx(EQ3_CHAIN_X0, rel=1e-14)
        it1 = schemes.accelerate(p, it0)
        assert it1.x == pytest.approx(EQ3_CHAIN_X1, rel=1e-14)

    def test_each_step_improves_reference_point(self):
        p = core.FlowPoint(1e5, 1e-4)
        lam = core.solve_colebrook_exact(p).iterate.lam
        it = schemes.starter_eq2(p)
        errs = [core.relative_error_pct(lam, it.lam)]
        for _ in range(2):
            it = schemes.accelerate(p, it)
            errs.append(core.relative_error_pct(lam, it.lam))
        assert errs[0] > errs[1] > errs[2]


class TestTheta:
    def test_is_negative(self):
        p = core.FlowPoint(1e5, 1e-4)
        th = schemes.theta(p, core.starter_eq2_raw(1e5, 1e-4))
        assert th.theta == pytest.approx(-7.066908105475309, rel=1e-12)
        assert th.theta < 0

    def test_rejects_smooth_limit(self):
        with pytest.raises(core.DomainError):
            schemes.theta(core.FlowPoint(1e5, 0.0), 7.0)

    def test_rejects_nonpositive_x(self):
        with pytest.raises(core.DomainError):
            schemes.theta(core.FlowPoint(1e5, 1e-4), 0.0)


class TestTransformedForm:
    def test_published_constants_are_the_printed_truncations(self):
        assert schemes.transformed_constants("published") == (1.1387478, 0.8686)

    def test_exact_constants(self):
        c1, c2 = schemes.transformed_constants("exact")
        assert c1 == pytest.approx(1.1387478192300917, rel=1e-15)
        assert c2 == pytest.approx(0.8685889638065035, rel=1e-15)

    def test_unknown_mode_rejected(self):
        with pytest.raises(schemes.SchemeError):
            schemes.transformed_constants("fast")

    def test_published_step_pin(self):
        p = core.FlowPoint(1e5, 1e-4)
        it1 = schemes.accelerate_transformed(p, schemes.starter_eq2(p))
        assert it1.step == 1
        assert it1.x == pytest.approx(TRANSFORMED_PUB_X1, rel=1e-14)

    def test_exact_constants_recover_direct_step(self):
        p = core.FlowPoint(1e5, 1e-4)
        it0 = schemes.starter_eq2(p)
        direct = schemes.accelerate(p, it0)
        transformed = schemes.accelerate_transformed(p, it0, constants="exact")
        assert transformed.x == pytest.approx(direct.x, rel=1e-13)

    def test_needs_roughness(self):
        p = core.FlowPoint(1e5, 0.0)
        with pytest.raises(core.DomainError):
            schemes.accelerate_transformed(p, schemes.starter_eq2(p))


class TestRegistry:
    def test_required_ids_present(self):
        assert REQUIRED_IDS <= set(schemes.scheme_ids())

    def test_transformed_variants_present(self):
        ids = set(schemes.scheme_ids())
        assert {"eq2a1-t", "eq2a2-t", "eq3a-t", "eq4a-t", "eq5a-t", "eq6a-t"} <= ids

    def test_ids_and_specs_agree(self):
        for sid in schemes.scheme_ids():
            assert schemes.get_scheme(sid).id == sid

    def test_unknown_id(self):
        with pytest.raises(schemes.RegistryError):
            schemes.get_scheme("eq99")

    def test_registry_is_read_only(self):
        with pytest.raises(TypeError):
            schemes.REGISTRY["eq2"] = None

    def test_invalid_spec_combinations(self):
        with pytest.raises(schemes.SchemeError):
            schemes.SchemeSpec(id="x", starter="eq2", accel_steps=1,
                               log_strategy="pade-one-log")
        with pytest.raises(schemes.SchemeError):
            schemes.SchemeSpec(id="x", starter="eq2", sin_strategy="pade")
        with pytest.raises(schemes.SchemeError):
            schemes.SchemeSpec(id="x", starter="eq6", accel_steps=2,
                               accel_form="transformed", log_strategy="pade-one-log")

    def test_table_row_ids(self):
        assert schemes.TABLE1_ROW_IDS == (
            "eq2a2", "eq6a", "eq5a", "eq2a1", "eq6", "eq5", "eq4a", "eq3a"
        )


class TestEvaluateScheme:
    def test_accepts_id_or_spec(self):
        p = core.FlowPoint(1e5, 1e-4)
        by_id = schemes.evaluate_scheme("eq2a2", p)
        by_spec = schemes.evaluate_scheme(schemes.get_scheme("eq2a2"), p)
        assert by_id.x == by_spec.x == pytest.approx(CHAIN_X2, rel=1e-14)

    def test_pade_one_log_route(self):
        p = core.FlowPoint(1e5, 1e-4)
        it = schemes.evaluate_scheme("eq2a2-pade", p)
        assert it.step == 2
        assert it.x == pytest.approx(CHAIN_X2, rel=1e-10)

    def test_normalized_starter_rejects_smooth(self):
        with pytest.raises(core.DomainError):
            schemes.evaluate_scheme("eq3", core.FlowPoint(1e5, 0.0))

    def test_eq2_family_accepts_smooth(self):
        it = schemes.evaluate_scheme("eq2a2", core.FlowPoint(1e5, 0.0))
        lam_ref = core.solve_colebrook_exact(core.FlowPoint(1e5, 0.0)).iterate.lam
        assert core.relative_error_pct(lam_ref, it.lam) < 0.5

    def test_transformed_variant_tracks_direct(self):
        p = core.FlowPoint(2e6, 3e-3)
        direct = schemes.evaluate_scheme("eq6a", p)
        trans = schemes.evaluate_scheme("eq6a-t", p, constants="exact")
        assert trans.x == pytest.approx(direct.x, rel=1e-12)

    def test_raw_matches_scalar_for_every_scheme(self):
        pts = [(4000.0, 1e-6), (1e5, 1e-4), (3.7e6, 2.4e-3), (1e8, 0.05), (12000.0, 0.01)]
        res = np.array([p[0] for p in pts])
        rough = np.array([p[1] for p in pts])
        for sid in schemes.scheme_ids():
            spec = schemes.get_scheme(sid)
            xs, _ = schemes.evaluate_scheme_raw(spec, res, rough)
            for i, (re, rr) in enumerate(pts):
                want = schemes.evaluate_scheme(spec, core.FlowPoint(re, rr)).x
                assert xs[i] == pytest.approx(want, rel=1e-15), (sid, re, rr)


class TestSineStrategies:
    def test_in_window_point_uses_kernel(self):
        # a=5, b=4 puts the eq6 sine argument at 0.695, inside the window
        n = core.NormalizedPoint(5.0, 4.0)
        exact = schemes.starter_eq6(n).x
        pade = schemes.starter_eq6(n, sin_strategy="pade").x
        assert pade != exact
        assert pade == pytest.approx(exact, rel=1e-3)

    def test_out_of_window_falls_back_to_exact(self):
        spec = schemes.SchemeSpec(id="w", starter="eq6", accel_steps=1,
                                  sin_strategy="pade")
        res = np.array([1e5, 4000.0])
        rough = np.array([1e-4, 1e-6])
        x_pade, fallbacks = schemes.evaluate_scheme_raw(spec, res, rough)
        x_exact, zero = schemes.evaluate_scheme_raw(schemes.get_scheme("eq6a"), res, rough)
        assert zero == 0
        assert fallbacks == 1
        assert x_pade[1] == x_exact[1]   # fell back, bitwise identical
        assert x_pade[0] != x_exact[0]

    def test_sine_argument_helper(self):
        n = core.NormalizedPoint(5.0, 4.0)
        arg = schemes.sine_argument("eq6", n)
        assert arg == pytest.approx(0.939 * 5.0 - 4.0, rel=1e-14)
        assert kernels.in_sin_window(arg)
