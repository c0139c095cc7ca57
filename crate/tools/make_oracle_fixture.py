"""Compute reference descriptor values with RDKit for the descriptor agreement tests.

  python tools/make_oracle_fixture.py data/zinc/zinc_moses_25k.smi 1000 7 \
      crates/core/tests/fixtures/zinc_oracle_1000.tsv
"""
import os
import random
import sys

from rdkit import Chem, RDConfig, RDLogger
from rdkit.Chem import Crippen, MolSurf, QED, rdMolDescriptors

sys.path.append(os.path.join(RDConfig.RDContribDir, "SA_Score"))
sys.path.append(os.path.join(RDConfig.RDContribDir, "NP_Score"))
import npscorer  # noqa: E402
import sascorer  # noqa: E402

RDLogger.DisableLog("rdApp.*")


def read_smiles(path):
    with open(path) as f:
        return [l.split()[0] for l in f if l.strip() and not l.startswith("#")]


def main(src, n, seed, out):
    pool = read_smiles(src)
    picked = random.Random(int(seed)).sample(pool, int(n)) if int(n) < len(pool) else pool
    np_model = npscorer.readNPModel()
    cols = ["smiles", "mw", "logp", "tpsa", "hbd", "hba", "rotb", "arom", "alerts",
            "qed", "sa", "np"]
    with open(out, "w") as f:
        f.write("# reference values computed with RDKit %s\n" % Chem.rdBase.rdkitVersion)
        f.write("\t".join(cols) + "\n")
        for smi in picked:
            m = Chem.MolFromSmiles(smi)
            if m is None:
                continue
            p = QED.properties(m)
            row = [smi, p.MW, Crippen.MolLogP(m), MolSurf.TPSA(m), p.HBD, p.HBA, p.ROTB,
                   p.AROM, p.ALERTS, QED.qed(m), sascorer.calculateScore(m),
                   npscorer.scoreMol(m, np_model)]
            f.write("\t".join(x if isinstance(x, str) else repr(x) for x in row) + "\n")


if __name__ == "__main__":
    main(*sys.argv[1:5])
