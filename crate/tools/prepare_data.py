"""Rebuild the shipped dataset and parameter files.

Sources (all fetched from PyPI, no other network access needed):
  * QM9 SMILES: the `qm9pack` wheel (data/qm9_part{1,2,3}.csv, SMILES column).
  * ZINC-derived drug-like sample: the `molsets` sdist (moses/dataset/data/train.csv.gz),
    a ZINC Clean Leads subset.
  * Crippen contributions: RDKit's Data/Crippen.txt.
  * SA and NP fragment contributions: RDKit Contrib fpscores.pkl.gz / publicnp.model.gz.

Usage:
  pip download --no-deps qm9pack -d wheels
  pip download --no-deps --no-binary :all: molsets==0.3.1 -d wheels
  python tools/prepare_data.py wheels
"""
import csv
import glob
import gzip
import io
import os
import pickle
import random
import sys
import tarfile
import zipfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")


def write_split(path, n, n_test, seed):
    idx = list(range(n))
    random.Random(seed).shuffle(idx)
    test = sorted(idx[:n_test])
    train = sorted(idx[n_test:])
    with open(path, "w") as f:
        f.write(f"# fixed split, seed {seed}\n[train]\n")
        f.writelines(f"{i}\n" for i in train)
        f.write("[test]\n")
        f.writelines(f"{i}\n" for i in test)


def qm9(wheel_dir):
    whl = glob.glob(os.path.join(wheel_dir, "qm9pack-*.whl"))[0]
    z = zipfile.ZipFile(whl)
    smiles = []
    for part in (1, 2, 3):
        with z.open(f"qm9pack/data/qm9_part{part}.csv") as fh:
            for row in csv.DictReader(io.TextIOWrapper(fh)):
                smiles.append(row["SMILES"])
    with open(os.path.join(DATA, "qm9", "qm9.smi"), "w") as f:
        f.write("# QM9 (GDB-9 subset), SMILES as distributed with qm9pack 1.0.3\n")
        f.writelines(s + "\n" for s in smiles)
    write_split(os.path.join(DATA, "qm9", "qm9.split"), len(smiles), 10000, 20190329)


def zinc(wheel_dir):
    sdist = glob.glob(os.path.join(wheel_dir, "molsets-*.tar.gz"))[0]
    t = tarfile.open(sdist)
    member = [m for m in t.getmembers() if m.name.endswith("dataset/data/train.csv.gz")][0]
    lines = gzip.open(t.extractfile(member), "rt").read().split()[1:]
    sample = random.Random(20190329).sample(lines, 25000)
    with open(os.path.join(DATA, "zinc", "zinc_moses_25k.smi"), "w") as f:
        f.write("# 25,000 seeded molecules from the MOSES training set (ZINC Clean Leads subset)\n")
        f.writelines(s + "\n" for s in sample)
    write_split(os.path.join(DATA, "zinc", "zinc_moses_25k.split"), len(sample), 2500, 20190329)


# Rows where the table compiled into the RDKit descriptor library differs
# from Data/Crippen.txt; the compiled table is what MolLogP uses.
CRIPPEN_OVERRIDES = {
    "[#1]O[!C;!N;!O;!S]": "[#1]O[!#6;!#7;!#8;!#16]",
    "[#1][!C;!N;!O]": "[#1][!#6;!#7;!#8]",
}


def params():
    from rdkit import RDConfig
    src = os.path.join(RDConfig.RDDataDir, "Crippen.txt")
    with open(src) as fin, open(os.path.join(DATA, "params", "crippen.tsv"), "w") as fout:
        fout.write("# format: crippen-v1\n# type\tsmarts\tlogp\n")
        for line in fin:
            if line.startswith("#") or not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            cols[1] = CRIPPEN_OVERRIDES.get(cols[1], cols[1])
            fout.write(f"{cols[0]}\t{cols[1]}\t{cols[2]}\n")
    contrib = RDConfig.RDContribDir
    sa = pickle.load(gzip.open(os.path.join(contrib, "SA_Score", "fpscores.pkl.gz")))
    rows = sorted((k, float(r[0])) for r in sa for k in r[1:])
    with gzip.GzipFile(os.path.join(DATA, "params", "sa_fragments.tsv.gz"), "wb", mtime=0) as g:
        g.write(b"# format: fragment-scores-v1 (environment id\tscore)\n")
        g.write("".join(f"{k}\t{v!r}\n" for k, v in rows).encode())
    np_model = pickle.load(gzip.open(os.path.join(contrib, "NP_Score", "publicnp.model.gz")))
    with gzip.GzipFile(os.path.join(DATA, "params", "np_fragments.tsv.gz"), "wb", mtime=0) as g:
        g.write(b"# format: fragment-scores-v1 (environment id\tscore)\n")
        g.write("".join(f"{k}\t{v!r}\n" for k, v in sorted(np_model.items())).encode())

    from rdkit.Chem import QED
    with open(os.path.join(DATA, "params", "qed.tsv"), "w") as f:
        f.write("# format: qed-v1\n# asymmetric double sigmoid parameters and mean weights\n")
        f.write("# property\tA\tB\tC\tD\tE\tF\tDMAX\tweight\n")
        for name, w in zip(QED.QEDproperties._fields, QED.WEIGHT_MEAN):
            p = QED.adsParameters[name]
            f.write("\t".join([name] + [repr(x) for x in p] + [repr(w)]) + "\n")
    with open(os.path.join(DATA, "params", "qed_acceptors.smarts"), "w") as f:
        f.write("# hydrogen-bond acceptor definitions used by QED\n")
        f.writelines(x + "\n" for x in QED.AcceptorSmarts)
    with open(os.path.join(DATA, "params", "qed_alerts.smarts"), "w") as f:
        f.write("# unwanted-functionality alerts used by QED (Brenk-style list as adopted by the\n")
        f.write("# RDKit QED module); a molecule scores one alert per pattern that matches\n")
        f.writelines(x + "\n" for x in QED.StructuralAlertSmarts)


if __name__ == "__main__":
    wheels = sys.argv[1]
    qm9(wheels)
    zinc(wheels)
    params()
