import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftdiff.dgf import (
    AdmissibilityConstants,
    GeneratingFunction,
    ParamTriple,
    ScaledFamily,
    builtin_dgf,
    builtin_names,
    check_dgf,
    compute_admissibility,
    invert_phi,
    nu1,
    nu2,
    psi_prime,
    spow,
)
from ftdiff.errors import (
    InversionRangeError,
    NotAdmissibleError,
    SetValuedPointError,
)

nonzero = st.floats(min_value=1e-8, max_value=1e8).map(lambda v: v)
signed = st.floats(min_value=-1e8, max_value=1e8, allow_nan=False)


def test_spow_values():
    assert spow(4.0, 0.5) == 2.0
    assert spow(-4.0, 0.5) == -2.0
    assert spow(0.0, 0.5) == 0.0
    assert spow(0.0, 0.0) == 0.0
    assert spow(3.0, 0.0) == 1.0
    assert spow(-3.0, 0.0) == -1.0
    assert spow(-2.0, 3.0) == -8.0


class TestParamTriple:
    def test_accepts_positive(self):
        t = ParamTriple(1.0, 2.0, 3.0)
        assert (t.k1, t.k2, t.k3) == (1.0, 2.0, 3.0)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(ValueError):
            ParamTriple(bad, 1.0, 1.0)
        with pytest.raises(ValueError):
            ParamTriple(1.0, bad, 1.0)
        with pytest.raises(ValueError):
            ParamTriple(1.0, 1.0, bad)


class TestAdmissibilityConstants:
    def test_d_below_one_rejected(self):
        with pytest.raises(ValueError):
            AdmissibilityConstants(B=1.0, C=1.0, D=0.5, exact=False)

    @pytest.mark.parametrize("field", ["B", "C"])
    def test_nonpositive_rejected(self, field):
        kwargs = {"B": 1.0, "C": 1.0, "D": 1.0, "exact": False}
        kwargs[field] = 0.0
        with pytest.raises(ValueError):
            AdmissibilityConstants(**kwargs)


class TestBuiltins:
    def test_names(self):
        assert set(builtin_names()) == {"sqrt", "ured", "exp"}

    def test_unknown_raises(self):
        with pytest.raises(KeyError):
            builtin_dgf("nope")

    def test_ured_point_values(self, ured):
        assert ured.phi(4.0) == pytest.approx(10.0, rel=1e-15)
        assert ured.phi(0.25) == pytest.approx(0.625, rel=1e-15)
        assert ured.phi(0.0) == 0.0
        # phi' = 1/(2 sqrt x) + 1.5 sqrt x
        assert ured.phi_prime(1.0) == pytest.approx(2.0, rel=1e-15)
        assert ured.phi_prime(4.0) == pytest.approx(0.25 + 3.0, rel=1e-15)

    def test_exp_point_values(self, expdgf):
        assert expdgf.phi(math.log(2.0)) == pytest.approx(1.0, rel=1e-14)
        assert expdgf.phi(0.0) == 0.0
        # phi'(x) = e^x / (2 sqrt(e^x - 1))
        assert expdgf.phi_prime(math.log(2.0)) == pytest.approx(1.0, rel=1e-14)

    def test_sqrt_point_values(self, sqrtdgf):
        assert sqrtdgf.phi(9.0) == 3.0
        assert sqrtdgf.phi(-9.0) == -3.0
        assert sqrtdgf.phi_prime(4.0) == 0.25

    @pytest.mark.parametrize("name", ["sqrt", "ured", "exp"])
    @given(x=st.floats(min_value=1e-10, max_value=1e10))
    @settings(max_examples=60, deadline=None)
    def test_oddness(self, name, x):
        dgf = builtin_dgf(name)
        assert dgf.phi(-x) == -dgf.phi(x)
        assert dgf.phi_prime(-x) == dgf.phi_prime(x)
        assert dgf.phi_second(-x) == -dgf.phi_second(x)

    @pytest.mark.parametrize("name", ["sqrt", "ured", "exp"])
    def test_derivatives_match_finite_differences(self, name):
        dgf = builtin_dgf(name)
        for x in (0.01, 0.3, 1.0, 2.5, 17.0):
            h = 1e-6 * x
            fd1 = (dgf.phi(x + h) - dgf.phi(x - h)) / (2.0 * h)
            assert fd1 == pytest.approx(dgf.phi_prime(x), rel=1e-8)
            fd2 = (dgf.phi_prime(x + h) - dgf.phi_prime(x - h)) / (2.0 * h)
            assert fd2 == pytest.approx(dgf.phi_second(x), rel=1e-6)

    def test_exp_large_argument_branches(self, expdgf):
        # asymptotic branches must join continuously with the exact forms
        for x in (349.9, 350.1, 699.9, 700.1):
            assert expdgf.phi_prime(x) > 0.0
            assert math.isfinite(expdgf.phi_second(x))
        r = expdgf.phi_second(350.1) / expdgf.phi_second(349.9)
        assert r == pytest.approx(math.exp(0.1), rel=1e-3)
        assert expdgf.phi(1500.0) == math.inf
        assert expdgf.phi(-1500.0) == -math.inf


class TestInversion:
    @pytest.mark.parametrize("name", ["sqrt", "ured", "exp"])
    @given(data=st.data())
    @settings(max_examples=60, deadline=None)
    def test_round_trip(self, name, data):
        dgf = builtin_dgf(name)
        # exp overflows past x = 1419: nothing to invert beyond that
        cap = 1419.0 if name == "exp" else 1e12
        x = data.draw(st.floats(min_value=1e-12, max_value=cap))
        z = dgf.phi(x)
        assert math.isfinite(z)
        back = invert_phi(dgf, z)
        assert back == pytest.approx(x, rel=1e-10)
        assert invert_phi(dgf, -z) == pytest.approx(-x, rel=1e-10)

    def test_ured_cardano_extremes(self, ured):
        for z in (1e-300, 1e-20, 1e-3, 0.9, 3.0, 1e80, 1e120, 1e200):
            x = invert_phi(ured, z)
            assert ured.phi(x) == pytest.approx(z, rel=1e-12)
        assert invert_phi(ured, 0.0) == 0.0

    def test_generic_route_matches_closed_form(self, ured):
        # same map without its closed-form inverse exercises the bracketed solve
        bare = GeneratingFunction(
            name="bare",
            phi=ured.phi,
            phi_prime=ured.phi_prime,
            phi_second=ured.phi_second,
        )
        for z in (1e-9, 1e-2, 1.0, 7.0, 1e5, 1e12):
            assert invert_phi(bare, z) == pytest.approx(
                invert_phi(ured, z), rel=1e-10)
            assert invert_phi(bare, -z) == pytest.approx(
                invert_phi(ured, -z), rel=1e-10)

    def test_bounded_map_out_of_range(self):
        capped = GeneratingFunction(
            name="capped",
            phi=lambda x: math.tanh(x),
            phi_prime=lambda x: 1.0 / math.cosh(x) ** 2,
            phi_second=lambda x: -2.0 * math.tanh(x) / math.cosh(x) ** 2,
        )
        with pytest.raises(InversionRangeError):
            invert_phi(capped, 2.0)


class TestInjections:
    @given(x=st.floats(min_value=1e-9, max_value=1e9),
           k3=st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=60, deadline=None)
    def test_sqrt_recovers_super_twisting(self, sqrtdgf, x, k3):
        # nu1 = sign(x) sqrt(|x|) and nu2 = sign(x), independent of k3
        assert nu1(sqrtdgf, k3, x) == pytest.approx(math.sqrt(x), rel=1e-12)
        assert nu1(sqrtdgf, k3, -x) == pytest.approx(-math.sqrt(x), rel=1e-12)
        assert nu2(sqrtdgf, k3, x) == pytest.approx(1.0, rel=1e-12)
        assert nu2(sqrtdgf, k3, -x) == pytest.approx(-1.0, rel=1e-12)

    def test_nu2_set_valued_at_zero(self, ured):
        with pytest.raises(SetValuedPointError):
            nu2(ured, 1.0, 0.0)

    def test_bad_k3(self, ured):
        for k3 in (0.0, -1.0, math.inf, math.nan):
            with pytest.raises(ValueError):
                nu1(ured, k3, 1.0)

    def test_nu1_definition(self, ured):
        k3 = 2.0
        for x in (0.5, -3.0, 10.0):
            assert nu1(ured, k3, x) == pytest.approx(
                ured.phi(k3 * k3 * x) / k3, rel=1e-15)

    def test_nu2_definition(self, expdgf):
        k3 = 1.5
        for x in (0.5, -3.0):
            u = k3 * k3 * x
            want = 2.0 * expdgf.phi(u) * expdgf.phi_prime(u)
            assert nu2(expdgf, k3, x) == pytest.approx(want, rel=1e-15)


class TestPsiPrime:
    def test_zero_at_origin(self, ured):
        assert psi_prime(ured, 3.0, 0.0) == 0.0

    @pytest.mark.parametrize("name", ["ured", "exp"])
    def test_even(self, name):
        dgf = builtin_dgf(name)
        for z in (1e-6, 0.3, 2.0, 50.0):
            assert psi_prime(dgf, 2.0, z) == psi_prime(dgf, 2.0, -z)

    @pytest.mark.parametrize("name", ["ured", "exp"])
    def test_matches_inverse_derivative(self, name):
        # Psi(z) = phi^2-scaled inverse; its slope must match 1/(k3 phi'(...))
        dgf = builtin_dgf(name)
        k3 = 1.7
        for z in (0.05, 0.4, 1.3, 9.0):
            h = 1e-6 * z
            psi = lambda v: invert_phi(dgf, k3 * v) / (k3 * k3)
            fd = (psi(z + h) - psi(z - h)) / (2.0 * h)
            assert psi_prime(dgf, k3, z) == pytest.approx(fd, rel=1e-7)

    @pytest.mark.parametrize("name,C", [("ured", 1.0 / math.sqrt(3.0)), ("exp", 1.0)])
    def test_bounded_by_c_over_k3(self, name, C):
        # admissibility item (ii) caps the inverse slope at C / k3
        dgf = builtin_dgf(name)
        for k3 in (0.5, 1.0, 4.0):
            sup = max(psi_prime(dgf, k3, z)
                      for z in [10.0 ** e for e in range(-9, 10)])
            assert sup <= C / k3 * (1.0 + 1e-9)


class TestScaledFamily:
    @pytest.mark.parametrize("eps", [0.1, 1.0, 10.0])
    def test_scaling_identity(self, ured, eps):
        fam = ScaledFamily(ured, eps)
        for x in (1e-4, 0.3, 2.0, 1e4):
            assert fam.phi(x) == pytest.approx(
                ured.phi(eps * eps * x) / eps, rel=1e-15)
            assert fam.phi_prime(x) == pytest.approx(
                eps * ured.phi_prime(eps * eps * x), rel=1e-15)

    @pytest.mark.parametrize("eps", [0.25, 3.0])
    def test_inverse_round_trip(self, expdgf, eps):
        fam = ScaledFamily(expdgf, eps)
        for x in (1e-3, 0.7, 5.0):
            assert fam.inverse(fam.phi(x)) == pytest.approx(x, rel=1e-10)

    def test_bad_epsilon(self, ured):
        with pytest.raises(ValueError):
            ScaledFamily(ured, 0.0)
        with pytest.raises(ValueError):
            ScaledFamily(ured, -2.0)


class TestCheckDgf:
    @pytest.mark.parametrize("name", ["sqrt", "ured", "exp"])
    def test_builtins_pass(self, name):
        report = check_dgf(builtin_dgf(name))
        assert report.passed
        assert len(report.items) == 5
        assert "ok" in report.summary()

    def test_identity_map_fails(self):
        ident = GeneratingFunction(
            name="ident",
            phi=lambda x: x,
            phi_prime=lambda x: 1.0,
            phi_second=lambda x: 0.0,
        )
        report = check_dgf(ident)
        assert not report.passed
        failed = {item.index for item in report.items if not item.passed}
        assert 4 in failed  # slope stays bounded at the origin

    def test_even_map_fails_oddness(self):
        even = GeneratingFunction(
            name="even",
            phi=lambda x: math.sqrt(abs(x)),
            phi_prime=lambda x: 0.5 / math.sqrt(abs(x)) * (1 if x > 0 else -1),
            phi_second=lambda x: -0.25 * abs(x) ** -1.5,
        )
        report = check_dgf(even)
        failed = {item.index for item in report.items if not item.passed}
        assert 1 in failed

    def test_decreasing_map_fails(self):
        dec = GeneratingFunction(
            name="dec",
            phi=lambda x: -spow(x, 0.5),
            phi_prime=lambda x: -0.5 * abs(x) ** -0.5,
            phi_second=lambda x: (0.25 if x > 0 else -0.25) * abs(x) ** -1.5,
        )
        report = check_dgf(dec)
        failed = {item.index for item in report.items if not item.passed}
        assert 3 in failed


class TestComputeAdmissibility:
    def test_ured_exact_constants(self, ured):
        c = compute_admissibility(ured)
        assert c.exact
        assert c.B == math.pi
        assert c.C == 1.0 / math.sqrt(3.0)
        assert c.D == 1.0
        assert c.d_raw is not None and c.d_raw <= 1.0 + 1e-9

    def test_exp_exact_constants(self, expdgf):
        c = compute_admissibility(expdgf)
        assert c.exact
        assert c.B == math.pi
        assert c.C == 1.0
        assert c.D == 1.0

    def test_sqrt_rejected(self, sqrtdgf):
        with pytest.raises(NotAdmissibleError):
            compute_admissibility(sqrtdgf)

    def test_wrong_claim_replaced_by_computed(self, ured):
        liar = GeneratingFunction(
            name="liar",
            phi=ured.phi,
            phi_prime=ured.phi_prime,
            phi_second=ured.phi_second,
            inverse=ured.inverse,
            claimed_constants=AdmissibilityConstants(
                B=2.0 * math.pi, C=1.0, D=2.0, exact=True),
        )
        c = compute_admissibility(liar)
        assert not c.exact
        assert c.B == pytest.approx(math.pi, rel=1e-6)
        assert c.C == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-4)
