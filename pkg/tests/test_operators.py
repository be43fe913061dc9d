import numpy as np
import pytest
from hypothesis import given, strategies as st

from fluxsim.basis import (IsingConfiguration, build_annealer_basis,
                           build_single_qubit_basis)
from fluxsim.config import default_config
from fluxsim.continuum import build_band
from fluxsim.operators import (AnnealerHamiltonian, AnnealerParams,
                               AssemblyError, GravononCoupling, PhononCoupling,
                               SingleQubitParams, assemble_annealer,
                               assemble_single_qubit, expectation,
                               flip_even_isometry, global_flip_matrix, pauli_x,
                               pauli_z)
from fluxsim.propagate import WaveFunctional
from fluxsim.scenarios import (make_annealer_params, make_j_matrix,
                               make_schedule, make_single_qubit_params)
from fluxsim.schedule import Schedule

spins_strategy = st.tuples(*([st.sampled_from((1, -1))] * 4))


def small_single_qubit_params(n=3, v_loc=(0.4, 0.4), v_dipole=0.1, w=0.05):
    band = build_band(n, 0.0, 1.0, w)
    return SingleQubitParams(e_qubit=(1.0, 0.0), e_warp=(1.0, 0.0),
                             v_loc=v_loc, omega_photon=1.0, v_dipole=v_dipole,
                             kappa_band=band, lambda_band=band)


class TestSingleQubitAssembly:
    def test_decoupled_limit_is_two_by_two_block(self):
        params = small_single_qubit_params(v_loc=(0.0, 0.0), w=0.0)
        basis = build_single_qubit_basis(3, 3)
        h = assemble_single_qubit(params, basis).dense()
        i1 = 0  # |1,0,0,0>
        im1 = 2  # |-1,1,0,0> (flat states come first)
        # the {|1,0,0,0>, |-1,1,0,0>} block has the dipole off-diagonal
        assert h[i1, im1] == pytest.approx(params.v_dipole)
        # and no other off-diagonal element on those rows
        row1 = np.delete(np.abs(h[i1]), [i1, im1])
        assert np.all(row1 == 0)

    def test_all_couplings_zero_gives_diagonal(self):
        params = small_single_qubit_params(v_loc=(0.0, 0.0), v_dipole=0.0, w=0.0)
        basis = build_single_qubit_basis(3, 3)
        h = assemble_single_qubit(params, basis).dense()
        assert np.allclose(h, np.diag(np.diag(h)))

    def test_default_params_hermitian_and_fully_tagged(self):
        cfg = default_config()
        params = make_single_qubit_params(cfg)
        n = cfg["single.band.n_modes"]
        basis = build_single_qubit_basis(n, n)
        op = assemble_single_qubit(params, basis)
        assert op.hermiticity_residual() < 1e-12
        # every structural nonzero is claimed by exactly one term tag
        claimed = {}
        for name, pairs in op.term_tags.items():
            for i, j in pairs:
                assert (i, j) not in claimed, f"({i},{j}) tagged twice"
                claimed[(i, j)] = name
        h = op.dense()
        nz = {(int(i), int(j)) for i, j in zip(*np.nonzero(h))}
        assert nz <= set(claimed)

    def test_excitation_number_conservation(self):
        """No matrix element connects photon sectors except the dipole term."""
        params = small_single_qubit_params()
        basis = build_single_qubit_basis(3, 3)
        op = assemble_single_qubit(params, basis)
        photon = np.array([c.photon_occupation for c in basis])
        h = op.dense()
        cross = {(int(i), int(j)) for i, j in zip(*np.nonzero(h))
                 if photon[i] != photon[j]}
        dipole = {tuple(map(int, p)) for p in op.term_tags["photon_dipole"]}
        assert cross == dipole

    def test_band_size_mismatch_rejected(self):
        params = small_single_qubit_params(n=4)
        basis = build_single_qubit_basis(3, 3)
        with pytest.raises(AssemblyError):
            assemble_single_qubit(params, basis)


class TestPauli:
    def test_pauli_z_signs(self):
        c = IsingConfiguration((1, -1, 1, -1))
        assert pauli_z(1, c) == (1, c)
        assert pauli_z(2, c) == (-1, c)

    def test_pauli_x_flips(self):
        c = IsingConfiguration((1, -1, 1, -1))
        assert pauli_x(1, c).spins == (-1, -1, 1, -1)

    @given(spins_strategy, st.integers(1, 4))
    def test_pauli_x_involution(self, spins, qubit):
        c = IsingConfiguration(spins)
        assert pauli_x(qubit, pauli_x(qubit, c)) == c

    def test_index_out_of_range(self):
        c = IsingConfiguration((1, 1, 1, 1))
        with pytest.raises(IndexError):
            pauli_z(5, c)
        with pytest.raises(IndexError):
            pauli_x(0, c)


def _plain_params(j, h0=1.0, t_f=100.0):
    return AnnealerParams(j_matrix=j, schedule=Schedule(t_f=t_f, h0=(h0,) * 4,
                                                        form="linear"))


class TestAnnealerAssembly:
    def test_ising_limit_diagonal(self):
        j = make_j_matrix(default_config())
        params = _plain_params(j)
        basis = build_annealer_basis(0, 0)
        h = assemble_annealer(params, basis, t=params.schedule.t_f).dense()
        assert np.allclose(h, np.diag(np.diag(h)))
        for i, c in enumerate(basis):
            s = np.array(c.ising.spins)
            expected = sum(j[a, b] * s[a] * s[b]
                           for a in range(4) for b in range(4) if a != b)
            assert h[i, i] == pytest.approx(expected)

    def test_uniform_transverse_field_spectrum(self):
        """J = 0, all fields h: eigenvalues -4h..+4h with binomial degeneracy."""
        h0 = 0.7
        params = _plain_params(np.zeros((4, 4)), h0=h0)
        basis = build_annealer_basis(0, 0)
        h = assemble_annealer(params, basis, t=0.0).dense()
        energies = np.sort(np.linalg.eigvalsh(h))
        expected = np.sort(np.repeat([-4, -2, 0, 2, 4],
                                     [1, 4, 6, 4, 1]) * h0)
        assert np.allclose(energies, expected, atol=1e-10)

    def test_phonon_window_closed_matches_no_phonon(self):
        cfg = default_config()
        basis = build_annealer_basis(1, 0)
        with_ph = make_annealer_params(cfg, phonon=True)
        without = AnnealerParams(j_matrix=with_ph.j_matrix,
                                 schedule=with_ph.schedule)
        t = 0.0  # far before the switch-on window opens
        h_a = assemble_annealer(with_ph, basis, t).dense()
        h_b = assemble_annealer(without, basis, t).dense()
        assert np.allclose(h_a, h_b, atol=1e-12)

    def test_global_flip_commutes_without_extensions(self):
        cfg = default_config()
        params = make_annealer_params(cfg)
        basis = build_annealer_basis(0, 0)
        f = global_flip_matrix(basis)
        for t in (0.0, 500.0, 1500.0, 2000.0):
            h = assemble_annealer(params, basis, t).dense()
            assert np.max(np.abs(f @ h - h @ f)) < 1e-10

    def test_gravonon_gating(self):
        """Scattering elements appear only on configurations whose coupled
        qubit points along the band's direction."""
        band = build_band(2, 0.0, 1.0, 0.3)
        params = AnnealerParams(
            j_matrix=np.zeros((4, 4)),
            schedule=Schedule(t_f=100.0, h0=(0.0,) * 4, form="linear"),
            gravonon=GravononCoupling(band=band, coupled_qubit=3, direction=1))
        basis = build_annealer_basis(0, 2)
        h = assemble_annealer(params, basis, 0.0).dense()
        for i, ci in enumerate(basis):
            for j, cj in enumerate(basis):
                if i == j or h[i, j] == 0:
                    continue
                # only mode-changing elements exist here (no fields, no J)
                assert ci.ising == cj.ising
                assert ci.ising.spins[2] == 1
                assert 0 in (ci.gravonon_index, cj.gravonon_index)
                assert h[i, j] == pytest.approx(band.coupling)

    def test_sparsity_linear_in_dimension(self):
        cfg = default_config().with_overrides({"gravonon.n_modes": "40"})
        nnz = []
        for n_modes in (20, 40):
            cfg_n = cfg.with_overrides({"gravonon.n_modes": str(n_modes)})
            params = make_annealer_params(cfg_n, phonon=True, gravonon=True)
            basis = build_annealer_basis(1, n_modes)
            h = assemble_annealer(params, basis, 1000.0)
            m = h.matrix if h.is_sparse else h.dense()
            count = m.nnz if h.is_sparse else int(np.count_nonzero(m))
            nnz.append(count / basis.dimension)
        # per-row occupancy stays bounded as the band grows
        assert nnz[1] < 1.5 * nnz[0]

    def test_hermiticity_of_full_assembly(self):
        cfg = default_config().with_overrides({"gravonon.n_modes": "10"})
        params = make_annealer_params(cfg, phonon=True, gravonon=True)
        basis = build_annealer_basis(1, 10)
        for t in (0.0, 400.0, 1200.0):
            op = assemble_annealer(params, basis, t)
            assert op.hermiticity_residual() < 1e-12

    def test_time_outside_schedule_rejected(self):
        params = _plain_params(np.zeros((4, 4)))
        basis = build_annealer_basis(0, 0)
        # the schedule allows 1% slack for midpoint evaluation; go past it
        with pytest.raises(ValueError):
            assemble_annealer(params, basis, -2.0)
        with pytest.raises(ValueError):
            assemble_annealer(params, basis, params.schedule.t_f + 2.0)


class TestExpectation:
    def test_eigenvector_returns_eigenvalue(self):
        params = _plain_params(make_j_matrix(default_config()))
        basis = build_annealer_basis(0, 0)
        op = assemble_annealer(params, basis, 50.0)
        energies, vectors = np.linalg.eigh(op.dense())
        psi = WaveFunctional(basis, vectors[:, 3])
        assert expectation(op, psi) == pytest.approx(energies[3])

    def test_uniform_superposition_mean_diagonal(self):
        params = _plain_params(make_j_matrix(default_config()))
        basis = build_annealer_basis(0, 0)
        op = assemble_annealer(params, basis, params.schedule.t_f)
        psi = WaveFunctional(basis, np.full(16, 0.25))
        assert expectation(op, psi) == pytest.approx(np.mean(np.diag(op.dense())))

    def test_matches_quadratic_form_oracle(self):
        rng = np.random.default_rng(7)
        params = _plain_params(make_j_matrix(default_config()))
        basis = build_annealer_basis(0, 0)
        op = assemble_annealer(params, basis, 30.0)
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        v /= np.linalg.norm(v)
        psi = WaveFunctional(basis, v)
        oracle = np.real(v.conj() @ op.dense() @ v)
        assert expectation(op, psi) == pytest.approx(oracle, abs=1e-12)


def test_flip_even_isometry_projects_even_sector():
    basis = build_annealer_basis(0, 0)
    iso = flip_even_isometry(basis)
    f = global_flip_matrix(basis)
    assert np.allclose(f @ iso, iso)  # columns are flip-even
    assert np.allclose(iso.T @ iso, np.eye(iso.shape[1]))
