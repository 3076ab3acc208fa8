import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from sampler_bench import (
    Density,
    InformedEllipse,
    OccupancyGrid,
    PlannerConfig,
    Point2,
    SceneSpec,
    generate_map,
    oracle_prior,
    plan_neural_informed,
    render_scene,
    render_svg,
    sample_problem,
)

SVG_NS = "{http://www.w3.org/2000/svg}"


def full_scene():
    grid = generate_map(4, Density.MEDIUM, 128, 128)
    problem = sample_problem(grid, 2, min_separation=60.0)
    prior = oracle_prior(problem)
    out = plan_neural_informed(problem, PlannerConfig(seed=1, iterations=400), prior)
    ellipse = InformedEllipse(problem.start, problem.goal, out.cost) if out.success else None
    return SceneSpec(grid=grid, tree=out.tree, path=out.path or None, prior=prior, ellipse=ellipse)


class TestRenderScene:
    def test_empty_grid_valid_svg(self):
        spec = SceneSpec(grid=OccupancyGrid(np.zeros((32, 48), dtype=bool)))
        doc = render_svg(spec)
        root = ET.fromstring(doc)
        assert root.tag == f"{SVG_NS}svg"
        assert root.attrib["viewBox"] == "0 0 48 32"

    def test_byte_deterministic(self, tmp_path):
        spec = full_scene()
        f1, f2 = tmp_path / "a.svg", tmp_path / "b.svg"
        render_scene(spec, f1)
        render_scene(spec, f2)
        assert f1.read_bytes() == f2.read_bytes()

    def test_full_scene_parses(self):
        root = ET.fromstring(render_svg(full_scene()))
        tags = {child.tag for child in root.iter()}
        assert f"{SVG_NS}polyline" in tags
        assert f"{SVG_NS}ellipse" in tags
        assert f"{SVG_NS}path" in tags

    def test_ellipse_attributes_match(self):
        e = InformedEllipse(Point2(10, 20), Point2(70, 60), c_best=90.0)
        spec = SceneSpec(grid=OccupancyGrid(np.zeros((96, 96), dtype=bool)), ellipse=e)
        root = ET.fromstring(render_svg(spec))
        el = root.find(f"{SVG_NS}ellipse")
        assert float(el.attrib["cx"]) == pytest.approx(e.center.x, abs=1e-3)
        assert float(el.attrib["cy"]) == pytest.approx(e.center.y, abs=1e-3)
        assert float(el.attrib["rx"]) == pytest.approx(e.semi_major, abs=1e-3)
        assert float(el.attrib["ry"]) == pytest.approx(e.semi_minor, abs=1e-3)
        rot = el.attrib["transform"]
        assert rot.startswith("rotate(")
        angle = float(rot[len("rotate(") :].split()[0])
        assert angle == pytest.approx(math.degrees(e.rotation), abs=1e-3)

    def test_path_vertices_inside_viewbox(self):
        spec = full_scene()
        if not spec.path:
            pytest.skip("no path on this seed")
        root = ET.fromstring(render_svg(spec))
        _, _, w, h = (float(v) for v in root.attrib["viewBox"].split())
        poly = root.find(f"{SVG_NS}polyline")
        for pair in poly.attrib["points"].split():
            x, y = (float(v) for v in pair.split(","))
            assert 0 <= x <= w and 0 <= y <= h

    def test_dimension_mismatch_rejected(self):
        grid = OccupancyGrid(np.zeros((16, 16), dtype=bool))
        other = OccupancyGrid(np.zeros((8, 8), dtype=bool))
        from sampler_bench import normalize

        prior = normalize(np.ones((8, 8)), other)
        with pytest.raises(ValueError):
            SceneSpec(grid=grid, prior=prior)

    def test_layer_toggles(self):
        spec = full_scene()
        spec.show_tree = False
        spec.show_prior = False
        spec.show_ellipse = False
        root = ET.fromstring(render_svg(spec))
        assert root.find(f"{SVG_NS}ellipse") is None
