#!/usr/bin/env python3
"""Regenerate the molecular fixtures under data/fixtures.

Each molecule gets an FCIDUMP (RHF molecular orbitals, STO-3G) and a JSON
sidecar with reference HF / CISD / FCI total energies. Requires pyscf.
"""
import json
import pathlib
import sys

from pyscf import ci, fci, gto, scf
from pyscf.tools import fcidump

GEOMETRIES = {
    "h2": "H 0 0 0; H 0 0 0.7414",
    "h4": "H 0 0 0; H 0 0 0.74; H 0 0 1.48; H 0 0 2.22",
    "lih": "Li 0 0 0; H 0 0 1.5949",
    "beh2": "Be 0 0 0; H 0 0 1.3264; H 0 0 -1.3264",
    "h2o": "O 0 0 0.1173; H 0 0.7572 -0.4692; H 0 -0.7572 -0.4692",
}


def build(name, atom, outdir):
    mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", symmetry=False, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    e_hf = mf.e_tot
    myci = ci.CISD(mf)
    myci.conv_tol = 1e-12
    e_cisd = myci.kernel()[0] + e_hf
    cis = fci.FCI(mf)
    cis.conv_tol = 1e-12
    e_fci = cis.kernel()[0]
    path = outdir / f"{name}.fcidump"
    fcidump.from_scf(mf, str(path), tol=1e-14)
    meta = {
        "molecule": name,
        "basis": "sto-3g",
        "geometry_angstrom": atom,
        "n_spatial_orbitals": int(mol.nao),
        "n_electrons": int(mol.nelectron),
        "e_hf": e_hf,
        "e_cisd": e_cisd,
        "e_fci": e_fci,
        "generator": f"pyscf {__import__('pyscf').__version__}",
    }
    (outdir / f"{name}.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(name, meta["n_spatial_orbitals"], meta["n_electrons"], e_hf, e_cisd, e_fci)


def main():
    outdir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/fixtures")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, atom in GEOMETRIES.items():
        build(name, atom, outdir)


if __name__ == "__main__":
    main()
