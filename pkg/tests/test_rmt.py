import numpy as np
import pytest

from floquet_coe.floquet import diagonalize_symmetric_unitary, spectral_amplitudes
from floquet_coe.rmt import (density_bessel_d, density_half_normal_c, density_poisson_r,
                             density_porter_thomas, reference_coe_r, sample_coe, sample_cue,
                             sample_goe)
from floquet_coe.seeding import seed_stream
from floquet_coe.stats import R_EDGES, Histogram, l1_between, l1_distance, r_statistics


def test_cue_unitary_and_deterministic():
    U = sample_cue(32, 5)
    assert np.max(np.abs(U.conj().T @ U - np.eye(32))) < 1e-9
    assert np.array_equal(U, sample_cue(32, 5))


def test_cue_haar_moment():
    vals = [abs(sample_cue(2, s)[0, 0]) ** 2 for s in range(10_000)]
    assert np.mean(vals) == pytest.approx(0.5, abs=0.02)


def test_cue_phase_fixing_gives_uniform_diagonal_phase():
    # without dividing out R's phases, QR of Ginibre is not Haar; U00's phase is then biased
    ph = np.array([np.angle(sample_cue(3, s)[0, 0]) for s in range(4000)])
    assert abs(np.mean(np.cos(ph))) < 0.05 and abs(np.mean(np.sin(ph))) < 0.05


def test_coe_symmetric_unitary():
    U = sample_coe(48, 2)
    assert np.max(np.abs(U - U.T)) < 1e-9
    assert np.max(np.abs(U.conj().T @ U - np.eye(48))) < 1e-9


def test_coe_real_eigenvectors_n256():
    U = sample_coe(256, 9)
    spec = diagonalize_symmetric_unitary(U)
    # eigenvectors are stored real; the complex eigen-equation holds to 1e-8
    assert spec.eigvecs.dtype == float
    assert spec.eigen_residual() < 1e-8


def test_goe_symmetry_and_moments():
    A = sample_goe(64, 1)
    assert np.array_equal(A, A.T)
    stack = np.stack([sample_goe(32, s) for s in range(400)])
    iu = np.triu_indices(32, 1)
    assert np.var(stack[:, np.arange(32), np.arange(32)]) == pytest.approx(1.0, rel=0.05)
    assert np.var(stack[:, iu[0], iu[1]]) == pytest.approx(0.5, rel=0.05)


def test_goe_semicircle():
    N, R = 512, np.sqrt(2 * 512)
    eig = np.concatenate([np.linalg.eigvalsh(sample_goe(N, s)) for s in range(50)])
    edges = np.linspace(-R, R, 31)
    h = Histogram.from_samples(eig, edges)

    class Semicircle:
        support = (-R, R)

        @staticmethod
        def mass(a, b):
            F = lambda x: (x * np.sqrt(R * R - x * x) + R * R * np.arcsin(x / R)) / (np.pi * R * R / 2) / 2
            a, b = max(a, -R), min(b, R)
            return F(b) - F(a) if b > a else 0.0

    assert l1_distance(h, Semicircle) < 0.05


@pytest.mark.parametrize("ref", [density_porter_thomas(1), density_porter_thomas(256),
                                 density_porter_thomas(rescaled=True), density_bessel_d(1),
                                 density_bessel_d(256), density_poisson_r(),
                                 density_half_normal_c(64)],
                         ids=lambda r: r.name)
def test_densities_normalized(ref):
    assert ref.normalization() == pytest.approx(1.0, abs=1e-6)
    # numeric integral of the pdf agrees with the masses used for binning
    from scipy import integrate
    lo, hi = ref.support
    val, _ = integrate.quad(lambda x: float(ref.pdf(x)), lo, hi, limit=200)
    assert val == pytest.approx(1.0, abs=1e-6)


def test_porter_thomas_tail_and_median():
    pt = density_porter_thomas(rescaled=True)
    assert pt.mass(1.0, np.inf) == pytest.approx(np.exp(-1), abs=1e-12)
    assert pt.mass(1.0, np.inf) == pytest.approx(0.36788, abs=1e-5)
    assert pt.mass(0.0, np.log(2)) == pytest.approx(0.5, abs=1e-12)
    ptN = density_porter_thomas(100)
    assert ptN.pdf(0.01) == pytest.approx(100 * np.exp(-1))


def test_bessel_density_shape_and_domain():
    ref = density_bessel_d(16)
    d = np.logspace(-6, 0, 200)
    assert np.all(np.diff(ref.pdf(d)) < 0)
    with pytest.raises(ValueError):
        ref.pdf(0.0)


def test_bessel_density_from_gaussian_products():
    # oracle: products of independent real Gaussians with variance 1/N
    N = 50
    rng = np.random.default_rng(0)
    d = np.abs(rng.normal(0, N ** -0.5, 400_000) * rng.normal(0, N ** -0.5, 400_000))
    h = Histogram.from_samples(d, np.linspace(0, 6 / N, 61))
    assert l1_distance(h, density_bessel_d(N)) < 0.02


@pytest.fixture(scope="module")
def iid_phase_r():
    """r-statistics of 10^6 i.i.d. uniform phases on the circle."""
    rng = np.random.default_rng(2718)
    return r_statistics(np.sort(rng.uniform(0, 2 * np.pi, 1_000_000)))


def test_poisson_r_matches_iid_oracle(iid_phase_r):
    h = Histogram.from_samples(iid_phase_r, R_EDGES)
    assert l1_distance(h, density_poisson_r()) < 0.02
    assert np.argmax(h.counts) == 0
    assert density_poisson_r().pdf(0.0) == max(density_poisson_r().pdf(np.linspace(0, 1, 11)))


def test_printed_lorentzian_form_does_not_match_oracle(iid_phase_r):
    # 2/(1+r^2) is not normalized on [0,1] (integral pi/2); even renormalized it misses the oracle
    from scipy import integrate
    assert integrate.quad(lambda r: 2 / (1 + r * r), 0, 1)[0] == pytest.approx(np.pi / 2)
    h = Histogram.from_samples(iid_phase_r, R_EDGES)
    c = 4 / np.pi
    masses = np.array([c * (np.arctan(b) - np.arctan(a)) / 2 for a, b in zip(R_EDGES[:-1], R_EDGES[1:])])
    assert np.sum(np.abs(h.masses - masses)) > 0.1


def test_poisson_mean_r(iid_phase_r):
    assert iid_phase_r.mean() == pytest.approx(2 * np.log(2) - 1, abs=0.002)
    assert iid_phase_r.mean() == pytest.approx(0.386, abs=0.002)


@pytest.fixture(scope="module")
def coe_refs():
    return reference_coe_r(256, 500, 100), reference_coe_r(256, 500, 200)


def test_coe_reference_properties(coe_refs):
    a, b = coe_refs
    assert a.mean_r == pytest.approx(0.53, abs=0.01)
    assert a.histogram.density[0] < 0.15  # level repulsion: Pr(r -> 0) -> 0
    assert l1_between(a.histogram, b.histogram) < 0.03
    assert a.density.normalization() == pytest.approx(1.0, abs=1e-12)


def test_reference_coe_requires_samples():
    with pytest.raises(ValueError):
        reference_coe_r(16, 50, 0)


@pytest.fixture(scope="module")
def coe_spectra():
    return [diagonalize_symmetric_unitary(sample_coe(256, seed_stream(77, i))) for i in range(100)]


def test_eigenvector_components_half_normal(coe_spectra):
    N = 256
    c = np.abs(np.concatenate([s.eigvecs.ravel() for s in coe_spectra]))
    h = Histogram.from_samples(c, np.linspace(0, 4 / np.sqrt(N), 41))
    assert l1_distance(h, density_half_normal_c(N)) < 0.05


def test_porter_thomas_from_coe_powers(coe_spectra):
    N = 256
    x = np.concatenate([N * np.abs(spectral_amplitudes(s.phases, s.eigvecs, 0, [50])[0]) ** 2
                        for s in coe_spectra])
    h = Histogram.from_samples(x, np.linspace(0, 12, 49))
    assert l1_distance(h, density_porter_thomas(rescaled=True)) < 0.1


def test_amplitude_variances(coe_spectra):
    N = 256
    va, vb = [], []
    for s in coe_spectra[:50]:
        amp = spectral_amplitudes(s.phases, s.eigvecs, 0, [1000])[0]
        va.append(np.var(amp.real))
        vb.append(np.var(amp.imag))
    assert np.mean(va) == pytest.approx(1 / (2 * N), rel=0.15)
    assert np.mean(vb) == pytest.approx(1 / (2 * N), rel=0.15)


def test_kappa_variance_monte_carlo(coe_spectra):
    # kappa = d cos(phi) with uniform phi: Var = 1/(2 N^2)
    N = 256
    rng = np.random.default_rng(5)
    s = coe_spectra[0]
    d = (s.eigvecs * s.eigvecs[0][None, :]).ravel()
    kappa = d * np.cos(rng.uniform(0, 2 * np.pi, d.size))
    assert np.var(kappa) == pytest.approx(1 / (2 * N * N), rel=0.05)


def test_kappa_density_monte_carlo():
    # kappa = c c0 cos(phi) for Gaussian components of variance 1/N and uniform phi
    from floquet_coe.rmt import ReferenceDensity
    from floquet_coe.special import k0

    N = 40
    rng = np.random.default_rng(8)
    n = 400_000
    kappa = (rng.normal(0, N ** -0.5, n) * rng.normal(0, N ** -0.5, n)
             * np.cos(rng.uniform(0, 2 * np.pi, n)))
    # the density of |kappa| is twice the symmetric density
    ref = ReferenceDensity("abs_kappa", lambda x: 2 * N / np.pi ** 2 * k0(N * np.asarray(x) / 2) ** 2,
                           (0.0, np.inf))
    assert ref.normalization() == pytest.approx(1.0, abs=1e-6)
    h = Histogram.from_samples(np.abs(kappa), np.linspace(0, 4 / N, 41))
    assert l1_distance(h, ref) < 0.02
    assert np.var(kappa) == pytest.approx(1 / (2 * N * N), rel=0.02)
