"""Walk the bundled three-class sample through every analysis stage."""

from cito.cfg import PathAnalysis
from cito.cli import explain_chains
from cito.coupling import ocplx
from cito.eord import build_eord, control_complexity
from cito.orders import enumerate_cycles, exhaustive_minimum, graph_based, multilevel_feedback, ria
from cito.samples import abc_model


def main() -> None:
    model = abc_model()
    analysis = PathAnalysis(model)
    full = build_eord(model, analysis=analysis)
    direct = build_eord(model, transitive=False, analysis=analysis)

    print("chains, hop by hop")
    print(explain_chains(model, full))
    t = control_complexity([ch for ch in full.chains if ch.pair == ("A", "C")], ("A", "C"))
    print(f"control complexity T(A,C) = {t.value}\n")

    print(f"{'edge':<8}{'label':<7}{'A':>3}{'M':>3}{'T':>10}{'SCplx':>10}")
    for e in full.edges:
        c = e.coupling
        print(f"{e.src}->{e.dst:<5}{e.label:<7}{c.attributes:>3}{c.methods:>3}{c.control:>10.6f}{e.scplx(full.weights):>10.6f}")

    for name, diagram in (("direct", direct), ("extended", full)):
        cycles = enumerate_cycles(diagram.successors())
        print(f"\n{name} diagram: {len(cycles)} cycles " + ", ".join("->".join(c + c[:1]) for c in cycles.cycles))
        best, best_order = exhaustive_minimum(diagram)
        for order in (graph_based(diagram), multilevel_feedback(diagram), ria(diagram, seed=0, iterations=500)):
            cost = ocplx(diagram, order)
            extra = f" removed {order.metadata['removed_edges']}" if "removed_edges" in order.metadata else ""
            print(f"  {order.strategy:<9} {','.join(order.sequence)}  OCplx={cost.ocplx:.6f} stubs={cost.stubs}{extra}")
        print(f"  optimum   {','.join(best_order)}  OCplx={best:.6f}")


if __name__ == "__main__":
    main()
