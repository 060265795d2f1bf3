import json
import random
from fractions import Fraction

import pytest

from ddlab.cancellation import (
    build_complement_variable,
    build_phi_extension,
    cancellation_certificate,
    compute_g_h,
    compute_slice_f,
    verify_E_iso,
)
from ddlab.derivations import canonical_lnd
from ddlab.isomorphisms import verify_iso_pair
from ddlab.poly import parse_poly
from ddlab.presentations import DDPresentation


@pytest.fixture(scope="module")
def dd1_cert(dd1):
    return cancellation_certificate(dd1)


class TestPhiExtension:
    def test_images_and_checks(self, dd1):
        actx, phi, report = build_phi_extension(dd1)
        assert report.passed
        assert [str(c) for c in phi.coeffs["Z"]] == ["Z", "X^3"]
        assert [str(c) for c in phi.coeffs["Y"]] == ["Y", "2*X^2*Z", "X^5"]
        assert [str(c) for c in phi.coeffs["W1"]] == ["W1", "-X"]
        assert [str(c) for c in phi.coeffs["X"]] == ["X"]

    def test_dd3_style_z_image(self):
        p = DDPresentation.make([], 2, 1, "Z^3 + X", "Y^2 + X*Z")
        actx, phi, report = build_phi_extension(p)
        assert report.passed
        assert [str(c) for c in phi.coeffs["Z"]] == ["Z", "X^3"]


class TestInvariantElements:
    def test_f_formula(self, dd1):
        actx, phi, _ = build_phi_extension(dd1)
        f = compute_slice_f(actx, phi)
        assert str(f.gen) == "X^2*W1 + Z"

    def test_f_exponent_one(self):
        # d = e = 1 gives exponent 1 (the e > 1 guard lives later, in g/h)
        p = DDPresentation.make([], 1, 1, "Z^2 - 1", "Y^2 + Z")
        actx, phi, _ = build_phi_extension(p)
        f = compute_slice_f(actx, phi)
        assert str(f.gen) == "X*W1 + Z"

    def test_g_h_dd1(self, dd1):
        actx, phi, _ = build_phi_extension(dd1)
        f = compute_slice_f(actx, phi)
        g, h, report = compute_g_h(actx, f, phi)
        assert report.passed
        assert g.gen == parse_poly("X^3*W1^2 + 2*X*Z*W1 + Y", actx.gen_ctx)
        expected_h = parse_poly(
            "X*T + 4*Y*Z*W1 + X*W1 + 2*X^2*Y*W1^2 + 4*X*Z^2*W1^2 + 4*X^3*Z*W1^3 + X^5*W1^4",
            actx.gen_ctx,
        )
        assert h.gen == expected_h

    def test_e_one_rejected(self):
        p = DDPresentation.make([], 1, 1, "Z^2 - 1", "Y^2 + Z")
        actx, phi, _ = build_phi_extension(p)
        f = compute_slice_f(actx, phi)
        with pytest.raises(Exception, match="e > 1"):
            compute_g_h(actx, f, phi)

    def test_small_algebra_relations(self, dd1):
        actx, phi, _ = build_phi_extension(dd1)
        f = compute_slice_f(actx, phi)
        g, h, _ = compute_g_h(actx, f, phi)
        small = verify_E_iso(actx, f, g, h)
        assert small.checks.passed
        assert small.presentation.e == 1
        assert "injective" in small.injectivity_note

    def test_complement_variable(self, dd1):
        actx, phi, _ = build_phi_extension(dd1)
        d = canonical_lnd(actx)
        comp = build_complement_variable(actx, d, phi)
        assert comp.checks.passed
        assert d.apply(comp.element) == actx.const(1)


class TestCertificateDD1:
    def test_certified(self, dd1_cert):
        assert dd1_cert.verdict == "non-cancellation pair certified"
        assert dd1_cert.certified
        assert all(item.passed for item in dd1_cert.steps)

    def test_exact_symbolic_elements(self, dd1_cert):
        ctx = dd1_cert.f.actx.gen_ctx
        assert dd1_cert.f.gen == parse_poly("X^2*W1 + Z", ctx)
        assert dd1_cert.g.gen == parse_poly("X^3*W1^2 + 2*X*Z*W1 + Y", ctx)
        assert dd1_cert.h.gen == parse_poly(
            "X*T + 4*Y*Z*W1 + X*W1 + 2*X^2*Y*W1^2 + 4*X*Z^2*W1^2 + 4*X^3*Z*W1^3 + X^5*W1^4",
            ctx,
        )

    def test_direct_identities(self, dd1_cert):
        report = dd1_cert.old_generators.direct_identities
        assert report.passed
        names = [c.name for c in report.items]
        assert "z = f - x^(d+e-1)*w" in names
        assert any(name.startswith("y = g +") for name in names)

    def test_old_generator_images_recover_t(self, dd1_cert):
        # the image of t over the smaller ring maps back to t's Laurent form
        backward = dd1_cert.backward
        forward = dd1_cert.forward
        actx = dd1_cert.f.actx
        t_image = backward.images["T"]
        assert forward.apply(t_image) == actx.gen("T")
        assert actx.gen("T").laurent.to_json() == {"-4": "Z^4 - 2*Z^2 + 1", "-2": "Z"}

    def test_non_isomorphism_part(self, dd1_cert):
        cert = dd1_cert.non_iso
        assert cert.not_isomorphic
        assert cert.tuple1.as_tuple() == (1, 2, 2, 2)
        assert cert.tuple2.as_tuple() == (1, 1, 2, 2)

    def test_brute_force_pair_agrees(self, dd1_cert):
        # full symbolic composite verification agrees with the structured one
        assert verify_iso_pair(dd1_cert.forward, dd1_cert.backward)

    def test_json_serializes(self, dd1_cert):
        payload = dd1_cert.to_json()
        text = json.dumps(payload)
        back = json.loads(text)
        assert back["schema"] == "dd-lab/1"
        assert back["verdict"] == "non-cancellation pair certified"
        assert back["f"]["expr"] == "X^2*W1 + Z"
        assert back["iso_pair"]["verified"] is True


class TestGuards:
    def test_e_one_rejected(self):
        p = DDPresentation.make([], 1, 1, "Z^2 - 1", "Y^2 + Z")
        cert = cancellation_certificate(p)
        assert not cert.certified
        assert "e > 1" in cert.verdict

    def test_omega3_failure_names_reason(self):
        p = DDPresentation.make([], 1, 2, "Z^2", "Y^2 + Z")
        cert = cancellation_certificate(p)
        assert not cert.certified
        assert "unit-ideal" in cert.verdict
        assert "P'(0,Z)" in cert.verdict

    def test_base_ring_guard(self):
        p = DDPresentation.make(["u1"], 1, 2, "Z^2 - u1 - 1", "Y^2 + Z")
        cert = cancellation_certificate(p)
        assert not cert.certified
        assert "R = Q" in cert.verdict


class TestRandomFamily:
    def test_family_certifies(self):
        # P = Z^r + c with c a nonzero rational, Q = Y^s + Z: the unit-ideal
        # conditions hold automatically and every draw must certify
        rng = random.Random(9090)
        for _ in range(5):
            r = rng.choice([2, 3, 4])
            s = rng.choice([2, 3])
            d = rng.choice([1, 2])
            e = rng.choice([2, 3])
            c = Fraction(rng.randint(1, 9), rng.randint(1, 5)) * rng.choice([1, -1])
            p = DDPresentation.make([], d, e, f"Z^{r} + {c}" if c > 0 else f"Z^{r} - {-c}",
                                    f"Y^{s} + Z")
            cert = cancellation_certificate(p)
            assert cert.certified, (r, s, d, e, c, cert.verdict)
            assert cert.non_iso.tuple1.as_tuple() == (d, e, r, s)
            assert cert.non_iso.tuple2.as_tuple() == (d, e - 1, r, s)
