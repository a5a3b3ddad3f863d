"""End-to-end smoke test of the Python bindings: generate data, train,
estimate, evaluate, and update on a tiny synthetic schema."""

import json
import os
import sys
import tempfile

import cardest


def approx_equal(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    with tempfile.TemporaryDirectory() as d:
        csv = os.path.join(d, "t1.csv")
        cardest.gen_data_csv(skew=1.0, correlation=0.6, domain=12, scale=4,
                             rows=3000, seed=5, table_name="t1", out_path=csv)
        schema = os.path.join(d, "schema.json")
        with open(schema, "w") as fh:
            json.dump({
                "tables": [{"name": "t1", "csv": "t1.csv",
                            "attrs": [{"name": f"c{i}"} for i in range(4)]}],
                "joins": [],
            }, fh)

        model = cardest.train(schema, seed=1)
        assert model.group_count == 1
        assert model.groups == [["t1"]]

        # Unconstrained query: estimate equals the table size exactly.
        est = cardest.estimate(model, {"tables": ["t1"], "predicates": []})
        assert approx_equal(est, 3000.0), est

        query = {"tables": ["t1"],
                 "predicates": [{"attr": "c0", "op": "in",
                                 "values": ["0", "1", "2"]}]}
        e1 = cardest.estimate(model, query)
        e2 = cardest.estimate(model, query)
        assert e1 == e2, (e1, e2)
        assert 0.0 < e1 < 3000.0

        # Exact and cached backends agree bit-for-bit.
        assert cardest.estimate(model, query, backend="exact") == e1

        lines = cardest.explain(model, query)
        assert any("sum out" in line for line in lines), lines

        # Persistence fidelity.
        path = os.path.join(d, "model.json")
        model.save(path)
        loaded = cardest.load_model(path)
        assert cardest.estimate(loaded, query) == e1

        # Evaluation over a labeled workload.
        workload = cardest.gen_workload(schema, count=20, seed=3)
        assert len(workload) == 20
        assert all("true_card" in q for q in workload)
        report = cardest.eval_workload(model, workload)
        assert report["count"] == 20
        assert report["summary"]["q50"] >= 1.0

        # Insert then delete the same rows restores the model exactly.
        rows = os.path.join(d, "rows.csv")
        with open(csv) as fh:
            head = [next(fh) for _ in range(6)]
        with open(rows, "w") as fh:
            fh.writelines(head)
        assert model.insert_csv(rows) == 5
        assert model.delete_csv(rows) == 5
        assert cardest.estimate(model, query) == e1

        # Structured errors surface as the package exception type.
        try:
            cardest.estimate(model, {"tables": ["nope"], "predicates": []})
        except cardest.CardestError:
            pass
        else:
            raise AssertionError("expected CardestError for an unknown table")

    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
