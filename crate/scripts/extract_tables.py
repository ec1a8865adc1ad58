"""Extract the FewXQuAD result tables and pre-training corpus tables from a
LaTeX-flavoured markdown copy of the paper.

    python scripts/extract_tables.py paper.md

Writes testdata/tables/fewxquad.k{0,2,5,10}.tsv in the report table layout
and crates/core/data/profiles/{bloom,xglm}.jsonl.
"""
import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
METHODS = {
    "MONO": "MONO",
    "Out-CLT": "OUT_CLT",
    "In-CLT (tgt-A)": "IN_CLT_TGT_A",
    "In-CLT (src-A)": "IN_CLT_SRC_A",
}
# Typos in the source tables.
ISO_FIXES = {"xs": "cs"}


def strip(cell):
    cell = re.sub(r"\\textbf\{([^}]*)\}", r"\1", cell)
    return cell.replace("\\\\", "").replace("\\midrule", "").replace("\\hline", "").strip()


def tables(text):
    for m in re.finditer(r"\\begin\{tabular\}.*?\\end\{tabular\}.*?\\caption\{([^}]*)\}", text, re.S):
        yield m.group(0), m.group(1)


def results(body, zero_shot):
    rows = []
    method = "MONO" if zero_shot else None
    header = None
    for line in body.splitlines():
        if "\\multicolumn" in line:
            name = strip(re.search(r"\\textbf\{([^}]*)\}", line).group(1))
            method = METHODS[name]
            continue
        if "&" not in line:
            continue
        cells = [strip(c) for c in line.split("&")]
        if cells[0].startswith("Models"):
            header = [c for c in cells[1:] if c != "Avg"]
            continue
        if header is None or method is None:
            continue
        values = cells[1 : 1 + len(header)]
        rows.append((cells[0], method, [v.replace("  ", " ") for v in values]))
    return header, rows


def write_results(text):
    out_dir = ROOT / "testdata" / "tables"
    out_dir.mkdir(parents=True, exist_ok=True)
    for body, caption in tables(text):
        m = re.match(r"(Zero|\d+)[- ]shot results on FewXQuAD", caption)
        if not m:
            continue
        k = 0 if m.group(1) == "Zero" else int(m.group(1))
        header, rows = results(body, k == 0)
        path = out_dir / f"fewxquad.k{k}.tsv"
        with path.open("w") as f:
            f.write("\t".join(["model", "method", *header]) + "\n")
            for model, method, values in rows:
                f.write("\t".join([model, method, *values]) + "\n")
        print(f"{path}: {len(rows)} rows", file=sys.stderr)


def corpus_rows(body):
    for line in body.splitlines():
        if "&" not in line or line.strip().startswith("Language"):
            continue
        cells = [strip(c) for c in line.split("&")]
        # XGLM prints two (name, iso, size) triples per row, separated by an empty cell
        groups = [cells[i : i + 3] for i in (0, 4) if len(cells) >= i + 3]
        for name, iso, size in groups:
            if not name:
                continue
            iso = None if iso == "-" else ISO_FIXES.get(iso, iso)
            yield {"iso": iso, "name": name, "gib": float(size)}


def write_profiles(text):
    out_dir = ROOT / "crates" / "core" / "data" / "profiles"
    out_dir.mkdir(parents=True, exist_ok=True)
    for body, caption in tables(text):
        m = re.match(r"Languages in the pre-training corpus of (\w+)", caption)
        if not m:
            continue
        family = m.group(1).lower()
        path = out_dir / f"{family}.jsonl"
        rows = sorted(corpus_rows(body), key=lambda r: (r["iso"] is None, r["iso"] or "", r["name"]))
        with path.open("w") as f:
            for r in rows:
                f.write(json.dumps({"model_family": family, **r}, ensure_ascii=False) + "\n")
        print(f"{path}: {len(rows)} rows", file=sys.stderr)


def main():
    text = Path(sys.argv[1]).read_text()
    write_results(text)
    write_profiles(text)


if __name__ == "__main__":
    main()
