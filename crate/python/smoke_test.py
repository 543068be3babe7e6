"""Smoke test for the pyimec extension module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/imec-py/Cargo.toml -o dist
    pip install dist/pyimec-*.whl
"""

import pyimec


def main():
    chain = pyimec.Graph.parse("nodes: 1 2 3\nedge: 1 -> 2\nedge: 2 -> 3\n")
    assert chain.classify() == ["LMG", "simple", "DAG", "ADMG", "directed-AG", "AG", "MAG", "RG"], chain.classify()
    assert chain.m_separated(["1"], ["3"], ["2"])
    assert not chain.m_separated(["1"], ["3"])
    assert chain.independence_model() == ["1 _||_ 3 | 2"]

    g = pyimec.Graph.figure("fig2-g")
    h = pyimec.Graph.figure("fig2-h")
    assert pyimec.markov_equivalent(g, h)["equivalent"]
    v = pyimec.i_markov_equivalent(g, h, [["1", "4"], ["1", "5"]])
    assert not v["equivalent"]
    assert "doubly-intervened selection node" in v["note"]
    assert v["witness"]["kind"] == "separation"

    fig3 = pyimec.Graph.figure("fig3")
    gi = fig3.interventional_graph([["1"]])
    assert sorted(gi.colliders_with_order()) == [(("1", "2", "3"), 1), (("2", "1", "w{1}#0"), 0)]

    left = pyimec.Graph.figure("fig6-left")
    right = pyimec.Graph.figure("fig6-right")
    targets = [[], ["1", "3"], ["3"]]
    assert pyimec.i_markov_equivalent(left, right, targets)["equivalent"]
    assert not pyimec.controlled_i_markov_equivalent(left, right, targets)["equivalent"]

    fig7 = pyimec.Graph.figure("fig7")
    assert "1 <-> 4" in fig7.maximal_completion().edges()

    dag, latents = right.canonical_dag()
    assert len(latents) == 2
    assert dag.latent_projection(["1", "2", "3"]) == right
    assert right.heads(["1", "2", "3"]) == [(["2", "3"], ["1"]), (["1"], [])]

    s = pyimec.sample_setting(right, targets, seed=3)
    assert len(s) == 3 and all(abs(sum(t) - 1.0) < 1e-12 for t in s.tables())
    assert s.in_mi_factorization(right)
    assert s.imarkov_property(right)

    for fig in ["fig1", "fig2", "fig3", "fig5", "fig6", "fig7", "fig8"]:
        passed, report = pyimec.reproduce(fig)
        assert passed, report

    try:
        pyimec.Graph.parse("edge: 1 -> 2\n")
    except ValueError:
        pass
    else:
        raise AssertionError("missing nodes line should be rejected")

    print("pyimec smoke test passed")


if __name__ == "__main__":
    main()
