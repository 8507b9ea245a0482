"""Grid construction, refinement and quadrature helpers."""

import numpy as np
import pytest

from warpedsphere import RadialGrid, refine_nodes
from warpedsphere.errors import StructuralError
from warpedsphere.grids import (PI, cumulative, cumulative_on, integrate,
                                node_weights)


class TestRadialGrid:
    def test_uniform_spans_zero_to_pi(self):
        g = RadialGrid.uniform(101)
        assert g.nodes[0] == 0.0
        assert g.nodes[-1] == pytest.approx(PI, abs=0)
        assert np.all(np.diff(g.nodes) > 0)

    def test_graded_spans_zero_to_pi(self):
        g = RadialGrid.graded(101)
        assert g.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert g.nodes[-1] == pytest.approx(PI, abs=1e-12)
        # graded nodes cluster at the poles
        d = np.diff(g.nodes)
        assert d[0] < d[d.size // 2]

    def test_raw_nodes_accepted(self):
        nodes = np.linspace(0.0, PI, 257)
        g = RadialGrid(nodes)
        assert g.n == 257

    @pytest.mark.parametrize("nodes", [
        np.linspace(0.0, PI, 5),              # too few
        np.linspace(0.1, PI, 64),             # wrong left endpoint
        np.linspace(0.0, 3.0, 64),            # wrong right endpoint
    ])
    def test_bad_nodes_rejected(self, nodes):
        with pytest.raises(StructuralError):
            RadialGrid(nodes)

    def test_nonmonotone_rejected(self):
        nodes = np.linspace(0.0, PI, 64)
        nodes[10], nodes[11] = nodes[11], nodes[10]
        with pytest.raises(StructuralError):
            RadialGrid(nodes)


class TestRefineNodes:
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_counts_and_endpoints(self, k):
        nodes = np.linspace(0.0, PI, 11)
        fine = refine_nodes(nodes, k)
        assert fine.size == (nodes.size - 1) * k + 1
        assert fine[0] == nodes[0]
        assert fine[-1] == nodes[-1]
        # original nodes are preserved at stride k
        assert np.allclose(fine[::k], nodes)

    def test_nonuniform_cells_subdivided_equally(self):
        nodes = np.array([0.0, 0.1, 0.5, PI])
        fine = refine_nodes(nodes, 2)
        assert fine[1] == pytest.approx(0.05)
        assert fine[3] == pytest.approx(0.3)


class TestQuadrature:
    def test_integrate_polynomial_exact(self):
        # Simpson is exact on cubics
        x = np.linspace(0.0, 2.0, 21)
        assert integrate(x**3, x) == pytest.approx(4.0, abs=1e-12)

    def test_integrate_sin_converges(self):
        x = np.linspace(0.0, PI, 201)
        assert integrate(np.sin(x), x) == pytest.approx(2.0, abs=1e-8)

    def test_cumulative_matches_antiderivative(self):
        x = np.linspace(0.0, PI, 401)
        c = cumulative(np.sin(x), x)
        assert c[0] == 0.0
        assert np.max(np.abs(c - (1.0 - np.cos(x)))) < 1e-8

    def test_cumulative_on_refines_callable(self):
        nodes = np.linspace(0.0, PI, 41)
        vals, total = cumulative_on(nodes, np.sin)
        assert vals.size == nodes.size
        assert total == pytest.approx(2.0, abs=1e-7)
        assert np.max(np.abs(vals - (1.0 - np.cos(nodes)))) < 1e-7

    def test_node_weights_sum_to_span(self):
        x = np.sort(np.append(np.linspace(0.0, PI, 33),
                              [0.1, 0.2, 3.0]))
        w = node_weights(x)
        assert np.all(w > 0)
        assert np.sum(w) == pytest.approx(PI, abs=1e-12)
