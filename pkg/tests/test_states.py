import numpy as np
import pytest

from subspace_witness.core.exceptions import (
    InvalidExcitation,
    InvalidSubspace,
    NotPositive,
    OutOfRange,
    ValidationException,
)
from subspace_witness.quantum.qcore import PureState
from subspace_witness.quantum.states import (
    BellParams,
    PhaseSetting,
    SubspaceSpec,
    bell,
    bell_mixture,
    bell_spec,
    canonical,
    dicke,
    from_correlators,
    ghz_spec,
    rho_phi,
    spec_from_name,
    target_state,
    w_spec,
)
from subspace_witness.quantum.witness import fidelity


@pytest.mark.unit
def test_subspace_spec_validation():
    with pytest.raises(InvalidSubspace):
        SubspaceSpec(2, ("00", "00"), (np.sqrt(0.5), np.sqrt(0.5)))
    with pytest.raises(InvalidSubspace):
        SubspaceSpec(2, ("00", "11"), (0.5, 0.5))
    with pytest.raises(InvalidSubspace):
        SubspaceSpec(2, ("00",), (1.0,))
    with pytest.raises(InvalidSubspace):
        SubspaceSpec(2, ("00", "112"), (np.sqrt(0.5), np.sqrt(0.5)))


@pytest.mark.unit
def test_dicke_labels_sorted_by_index():
    spec = dicke(4, 2)
    assert spec.basis == ("0011", "0101", "0110", "1001", "1010", "1100")
    assert np.allclose(spec.amps, 1 / np.sqrt(6))
    assert dicke(6, 3).d == 20


@pytest.mark.unit
@pytest.mark.parametrize("n,k", [(3, 0), (3, 3), (2, 5)])
def test_dicke_rejects_trivial_excitations(n, k):
    with pytest.raises(InvalidExcitation):
        dicke(n, k)


@pytest.mark.unit
def test_named_specs():
    assert w_spec(4).basis == ("0001", "0010", "0100", "1000")
    assert ghz_spec(3).basis == ("000", "111")
    assert bell_spec("psi").basis == ("01", "10")
    assert spec_from_name("bell") == bell_spec()
    assert spec_from_name("bell-psi") == bell_spec("psi")
    assert spec_from_name("GHZ3") == ghz_spec(3)
    assert spec_from_name("w4") == w_spec(4)
    assert spec_from_name("dicke:6:3").d == 20


@pytest.mark.unit
@pytest.mark.parametrize("name", ["ghz", "dicke:6", "nonsense"])
def test_spec_from_name_rejects_unknown(name):
    with pytest.raises(ValidationException):
        spec_from_name(name)


@pytest.mark.unit
def test_spec_text_round_trip(tmp_path):
    spec = SubspaceSpec(3, ("001", "010", "100"), tuple(np.array([1.0, 2.0, 2.0]) / 3))
    path = spec.save(tmp_path / "custom.subspace")
    for loaded in (SubspaceSpec.load(path), spec_from_name(str(path))):
        assert loaded.basis == spec.basis
        assert np.allclose(loaded.amps, spec.amps, atol=1e-15)


@pytest.mark.unit
def test_spec_text_renormalises_and_skips_comments():
    spec = SubspaceSpec.from_text("# bell\n00 1\n\n11 1  # second label\n")
    assert spec.basis == ("00", "11")
    assert np.allclose(spec.amps, np.sqrt(0.5))


@pytest.mark.unit
def test_spec_text_errors():
    with pytest.raises(InvalidSubspace):
        SubspaceSpec.from_text("00 1 extra\n")
    with pytest.raises(InvalidSubspace):
        SubspaceSpec.from_text("00 x\n11 1\n")
    with pytest.raises(InvalidSubspace):
        SubspaceSpec.from_text("00 -1\n11 1\n")


@pytest.mark.unit
def test_phase_setting_canonicalisation():
    setting = PhaseSetting((2 * np.pi + 0.1, -0.1))
    assert setting.thetas == pytest.approx((0.1, 2 * np.pi - 0.1))
    with pytest.raises(OutOfRange):
        PhaseSetting((np.nan, 0.0))


@pytest.mark.unit
def test_induced_phases_are_label_dot_theta():
    spec = w_spec(3)
    setting = PhaseSetting((0.1, 0.2, 0.3))
    # labels 001, 010, 100 pick theta_3, theta_2, theta_1
    assert setting.induced_phases(spec) == pytest.approx([0.3, 0.2, 0.1])
    assert PhaseSetting((0.1, 0.2, 0.3)).induced_phases(ghz_spec(3)) == pytest.approx([0.0, 0.6])


@pytest.mark.unit
def test_from_label_phases_for_w_type_specs():
    spec = w_spec(3)
    setting = PhaseSetting.from_label_phases(spec, [0.5, 1.0, 4.0])
    assert setting.induced_phases(spec) == pytest.approx([0.5, 1.0, 4.0])
    with pytest.raises(ValidationException):
        PhaseSetting.from_label_phases(ghz_spec(3), [0.0, 1.0])


@pytest.mark.unit
def test_bell_matches_target_state():
    phi = 0.7
    psi = bell(BellParams("phi", phi))
    target = target_state(bell_spec(), PhaseSetting((0.0, phi)))
    assert np.allclose(psi.amplitudes, target.amplitudes)
    assert np.allclose(bell(BellParams("psi")).amplitudes, [0, np.sqrt(0.5), np.sqrt(0.5), 0])
    with pytest.raises(ValidationException):
        BellParams("chi")  # type: ignore[arg-type]


@pytest.mark.unit
def test_canonical_removes_global_phase():
    psi = target_state(w_spec(3), PhaseSetting((0.0, 0.4, 1.1)))
    shifted = PureState(psi.amplitudes * np.exp(0.9j))
    assert np.allclose(canonical(shifted).amplitudes, canonical(psi).amplitudes)
    lead = canonical(shifted).amplitudes[1]
    assert lead.imag == pytest.approx(0.0) and lead.real > 0


@pytest.mark.unit
def test_rho_phi_coherence_and_population():
    eps, theta, phi0 = 0.8, 0.6, 1.1
    rho = rho_phi(eps, theta, phi0)
    expected = (eps / 2) * (np.cos(phi0) + 1j * np.sin(phi0) * np.sin(theta))
    assert rho.element(0, 3) == pytest.approx(expected)
    assert (rho.element(0, 0) + rho.element(3, 3)).real == pytest.approx(1.0)
    assert rho_phi(1.0, theta, phi0).purity() == pytest.approx(1.0)


@pytest.mark.unit
def test_rho_phi_rejects_bad_parameters():
    with pytest.raises(NotPositive):
        rho_phi(1.5, 0.0, 0.3)
    with pytest.raises(OutOfRange):
        rho_phi(-0.1, 0.0, 0.3)
    with pytest.raises(OutOfRange):
        rho_phi(0.5, 0.0, 4.0)


@pytest.mark.unit
def test_from_correlators_fidelity():
    rho = from_correlators(0.4970, 0.2142, -0.5857)
    assert fidelity(rho, bell(BellParams())) == pytest.approx(0.574225, abs=1e-12)


@pytest.mark.unit
def test_bell_mixture():
    rho = bell_mixture(0.371, 0.3117 * np.exp(0.4j))
    assert rho.element(0, 3) == pytest.approx(0.3117 * np.exp(0.4j))
    assert rho.element(1, 1).real == pytest.approx(0.5 - 0.371)
    psi_branch = bell_mixture(0.3, 0.1, branch="psi")
    assert psi_branch.element(1, 2) == pytest.approx(0.1)
    with pytest.raises(OutOfRange):
        bell_mixture(0.6, 0.1)
    with pytest.raises(NotPositive):
        bell_mixture(0.2, 0.3)
