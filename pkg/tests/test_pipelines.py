import json

import numpy as np
import pytest
from mpmath import mp

from hlab import curves, pipelines, profiles
from hlab.errors import MellinZeroError
from hlab.greens import GreensFamily
from hlab.pipelines import (Grids, extract_diagonal_powers, extract_diagonal_product, extract_diagonal_zfamily,
                            extract_offdiagonal, intexp_forward, intexp_prediction, msexp_check,
                            product_slot_samples, scalar_curvature_d4)


@pytest.mark.parametrize("d, mu, k_max, o", [(4, 0.3, 2, 0), (4, -0.5, 1, 1), (3, 0.7, 2, 0), (2, 0.4, 2, 1)])
def test_zfamily_recovers_closed_form(d, mu, k_max, o):
    rep = extract_diagonal_zfamily(GreensFamily(d, mu), k_max=k_max, o=o)
    for k in range(k_max + 1):
        assert abs(rep.recovered[k] - mp.mpf(mu) ** k) <= 1e-6 * max(1, abs(mp.mpf(mu) ** k))
    assert rep.max_error() < 1e-6


def test_transport_reference_matches_closed_form():
    fam = GreensFamily(4, 0.3)
    a = extract_diagonal_zfamily(fam, k_max=2, reference="transport")
    b = extract_diagonal_zfamily(fam, k_max=2)
    for k in range(3):
        assert abs(a.reference[k] - b.reference[k]) < 1e-10
        assert a.recovered[k] == b.recovered[k]


def test_offsets_agree():
    fam = GreensFamily(4, 0.6)
    a = extract_diagonal_zfamily(fam, k_max=1, o=0).recovered
    b = extract_diagonal_zfamily(fam, k_max=1, o=1).recovered
    assert all(abs(a[k] - b[k]) < 1e-8 for k in range(2))


def test_powers_reading_gives_same_numbers():
    fam = GreensFamily(3, 0.2)
    a = extract_diagonal_zfamily(fam, k_max=1)
    b = extract_diagonal_powers(fam, k_max=1)
    assert a.recovered == b.recovered
    assert b.pipeline == "powers"


def test_z_nodes_grow_with_the_needed_truncation():
    rep = extract_diagonal_zfamily(GreensFamily(4, 0.2), k_max=3, grids=Grids(z_count=6))
    assert rep.diagnostics["z_count"] == 7
    assert rep.max_error() < 1e-4
    rep = extract_diagonal_zfamily(GreensFamily(4, 3.0), k_max=1)
    assert rep.diagnostics["z_count"] > 6
    assert rep.max_error() < 1e-6


def test_non_geodesic_rejected():
    with pytest.raises(ValueError):
        extract_diagonal_zfamily(GreensFamily(3), w=curves.StraightLine(3, direction=[2.0, 0, 0]), k_max=1)


@pytest.mark.parametrize("mu", [0.0, 0.25, -1.5])
def test_scalar_curvature(mu):
    scal, rep = scalar_curvature_d4(GreensFamily(4, mu))
    assert abs(scal - 6 * mu) <= 1e-6 * max(1, abs(6 * mu))
    assert "1,0" in rep.diagnostics["q_weights"]


def test_scalar_curvature_needs_four_dimensions():
    with pytest.raises(ValueError):
        scalar_curvature_d4(GreensFamily(3))


def test_product_pipeline_straight_line():
    rep = extract_diagonal_product(GreensFamily(3, 0.5), k_max=1, refine=False)
    assert rep.max_error() < 1e-6


def test_product_slots_follow_the_derivative_formula():
    fam = GreensFamily(2, 0.5)
    base = curves.HyperbolicCurve(2)
    f = profiles.odd_bump()
    per_xi, _, _ = product_slot_samples(fam, base, f, 1, [1.2])
    predicted = intexp_prediction(fam.lifted(), curves.LiftedCurve(base, 1.2), f, 2)
    for got, ref in zip(per_xi[1.2], predicted):
        assert abs(got - ref) <= 1e-6 * abs(ref)


@pytest.mark.parametrize("d, y", [(2, [1.0, 0.3]), (3, [-0.8, 0.1, 0.2]), (4, [1.2, 0.0, 0.3, 0.1])])
def test_offdiagonal(d, y):
    rep = extract_offdiagonal(GreensFamily(d, 0.4), y=y, k_max=2)
    assert rep.max_error() < 1e-6
    assert rep.diagnostics["eps_fit"]["residual_norm"] < 1e-6
    assert rep.diagnostics["branch"] == ("+" if y[0] > 0 else "-")


def test_offdiagonal_opposite_branch_vanishes():
    rep = extract_offdiagonal(GreensFamily(2, 0.4), y=[1.0, 0.3], branch="-", k_max=1)
    assert all(v == 0 for v in rep.recovered.values())


def test_offdiagonal_rejects_spacelike():
    with pytest.raises(ValueError):
        extract_offdiagonal(GreensFamily(2), y=[0.1, 0.5])


@pytest.mark.parametrize("d, w", [(3, curves.HyperbolicCurve(3)), (4, curves.StraightLine(4))])
def test_intexp_forward(d, w):
    rep = intexp_forward(GreensFamily(d, 0.5), w, slots=3)
    assert rep.max_error() < 1e-6


@pytest.mark.parametrize("alpha", [1, -1, "3/2"])
def test_msexp(alpha):
    from fractions import Fraction
    rep = msexp_check(Fraction(alpha), terms=4)
    assert rep.max_error() < 1e-6


def test_fd_weights_exact():
    from fractions import Fraction
    nodes, w = pipelines.fd_weights(2, 1)
    assert nodes == [-1, 0, 1] and w == [1, -2, 1]
    nodes, w = pipelines.fd_weights(4, 3)
    assert sum(c * Fraction(x) ** 4 for x, c in zip(nodes, w)) == 24
    assert sum(c * Fraction(x) ** 6 for x, c in zip(nodes, w)) == 0


def test_vanishing_mellin_values_are_reported():
    flat = profiles.product(profiles.polynomial([0.0]), profiles.odd_bump())
    with pytest.raises(MellinZeroError):
        pipelines.checked_mprime(flat, 1)


def test_report_serialises():
    rep = extract_offdiagonal(GreensFamily(2, 0.4), k_max=1)
    data = json.loads(json.dumps(rep.to_dict()))
    assert set(data) >= {"pipeline", "recovered", "reference", "relative_errors", "diagnostics", "config"}
    assert pipelines.fmt(mp.mpf(1) / 3).startswith("0.33333333333333333333")


def test_double_precision_mode():
    from hlab import precision
    precision.set_precision("double")
    assert np.finfo(precision.real_dtype()).eps > 1e-17
    rep = extract_diagonal_zfamily(GreensFamily(4, 0.3), k_max=1)
    assert rep.max_error() < 1e-5
