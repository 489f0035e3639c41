"""Smoke test for the seedcheck_py extension. Run after installing it."""

import json

import seedcheck_py as sc


def main():
    alpha = sc.Alphabet()
    assert "c" in alpha.channels and "a" in alpha.names

    p = sc.Process("c?u.d!a.nil + d!a.c?u.nil")
    q = sc.Process("c?u.nil | d!a.nil")
    assert p.encode().startswith("sum(")
    assert p.transitions()

    r = sc.check("seb", p, q)
    assert r.exit_code == 0 and r.agreement is True and r.equivalent is True
    doc = json.loads(r.to_json())
    assert doc["schema"] == "seedcheck-report/1"
    assert sc.Report.from_json(r.to_json()).exit_code == 0

    p = sc.Process("c!u.d!a.nil + c!u.d!b.nil")
    q = sc.Process("c!u.(d!a.nil + d!b.nil)")
    assert sc.check("trace", p, q).equivalent is True
    r = sc.check("seb", p, q, method="seed")
    assert r.exit_code == 1 and r.seed_equivalent is False and r.oracle_equivalent is None

    assert "Process-Trans" in sc.layers()
    assert len(sc.hierarchy_edges()) == 13
    lines = sc.closures("process-trans", sc.Process("c!a.nil"), depth=1)
    assert lines == ["toutput([q],[c],[a]) = {tconf(nil,o-proc(c,a,nil),())}"]

    try:
        sc.Process("c!.nil +")
    except ValueError:
        pass
    else:
        raise AssertionError("bad syntax accepted")

    summary = json.loads(sc.run_corpus(pairs=4, named=False))
    assert summary["entries"] == 4
    assert summary["disagreements"] == [] and summary["hierarchy_violations"] == []
    print("smoke test passed")


if __name__ == "__main__":
    main()
