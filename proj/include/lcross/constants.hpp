#pragma once

// Unit conventions: all internal quantities are atomic units
// (hartree, bohr, hbar = 1, electron mass = 1). Conversions live
// at the API boundary only.

namespace lcross::units {

inline constexpr double hartree_per_ev = 1.0 / 27.211386245988;
inline constexpr double ev_per_hartree = 27.211386245988;
inline constexpr double au_per_fs = 41.341373335182;
inline constexpr double fs_per_au = 1.0 / au_per_fs;
inline constexpr double au_per_ps = 1000.0 * au_per_fs;
inline constexpr double me_per_amu = 1822.888486209;
// photon energy (hartree) of a wavelength in nm: E = 2*pi*c/lambda
inline constexpr double nm_hartree_product = 45.563352529120;

inline constexpr double ev_to_hartree(double ev) { return ev * hartree_per_ev; }
inline constexpr double hartree_to_ev(double eh) { return eh * ev_per_hartree; }
inline constexpr double fs_to_au(double fs) { return fs * au_per_fs; }
inline constexpr double au_to_fs(double t) { return t * fs_per_au; }
inline constexpr double amu_to_au(double amu) { return amu * me_per_amu; }
inline constexpr double nm_to_hartree(double nm) { return nm_hartree_product / nm; }

}  // namespace lcross::units
