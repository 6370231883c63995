import json

import numpy as np
import pytest
from docgen import build_session, random_document

from pcscaffold.cloud import PointCloud
from pcscaffold.errors import InvalidOperationError, VersionError
from pcscaffold.geometry import Pose
from pcscaffold.project import (
    ItemFlags,
    ProjectDocument,
    SessionLog,
    apply_operation,
    document_from_dict,
    document_to_dict,
    documents_equal,
    load_project,
    registered_operations,
    replay,
    save_project,
)
from pcscaffold.scaffold import PartAssembly, add_hole, insert_scaffold_obb


def cup_with_handle_doc():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(60, 3)) * [0.4, 0.4, 1.0]
    cup_cloud = PointCloud(pts, name="scan")
    cup = add_hole(insert_scaffold_obb(cup_cloud, name="cup"), [0, 1, 2])
    handle = insert_scaffold_obb(cup_cloud, primitive="box", n_slices=3,
                                 name="handle")
    asm = PartAssembly((cup, handle), "mug")
    return ProjectDocument(clouds={"scan": cup_cloud},
                           assemblies={"mug": asm},
                           flags={"mug": ItemFlags(visible=True,
                                                   locked=True)})


class TestRoundTrip:
    def test_empty_project(self, tmp_path):
        doc = ProjectDocument()
        p = tmp_path / "empty.scafproj"
        save_project(doc, p)
        assert documents_equal(load_project(p), doc)

    def test_cup_handle_assembly_bitwise(self, tmp_path):
        doc = cup_with_handle_doc()
        p = tmp_path / "mug.scafproj"
        save_project(doc, p)
        back = load_project(p)
        assert documents_equal(back, doc)
        a = back.assemblies["mug"].parts[0]
        b = doc.assemblies["mug"].parts[0]
        for sa, sb in zip(a.slices, b.slices):
            np.testing.assert_array_equal(sa.external_handles,
                                          sb.external_handles)
            if sb.hole_handles is not None:
                np.testing.assert_array_equal(sa.hole_handles,
                                              sb.hole_handles)
            np.testing.assert_array_equal(sa.plane.pose.position,
                                          sb.plane.pose.position)
        assert back.flags["mug"].locked

    def test_save_is_deterministic(self, tmp_path):
        doc = cup_with_handle_doc()
        p1, p2 = tmp_path / "a.scafproj", tmp_path / "b.scafproj"
        save_project(doc, p1)
        save_project(load_project(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    @pytest.mark.parametrize("seed", range(25))
    def test_random_documents(self, tmp_path, seed):
        doc = random_document(seed)
        p = tmp_path / "r.scafproj"
        save_project(doc, p)
        assert documents_equal(load_project(p), doc)

    def test_unknown_version_rejected(self, tmp_path):
        p = tmp_path / "v.scafproj"
        p.write_text(json.dumps({"version": "99"}))
        with pytest.raises(VersionError, match="99"):
            load_project(p)

    def test_missing_version_rejected(self, tmp_path):
        p = tmp_path / "v.scafproj"
        p.write_text("{}")
        with pytest.raises(VersionError):
            load_project(p)


class TestInvariants:
    def test_scaffold_must_reference_document_cloud(self):
        doc = cup_with_handle_doc()
        with pytest.raises(InvalidOperationError, match="references cloud"):
            ProjectDocument(assemblies=doc.assemblies)

    def test_grasp_reference_checked(self):
        doc = random_document(1)
        bad = dict(doc.grasps)
        from pcscaffold.grasp import FRAME_SENSOR, GraspAnnotation
        bad["oops"] = GraspAnnotation(Pose(), Pose(), FRAME_SENSOR,
                                      object_ref="no-such-thing")
        with pytest.raises(InvalidOperationError, match="no-such-thing"):
            doc.replace(grasps=bad)


class TestOperations:
    def test_insert_creates_assembly(self):
        doc = ProjectDocument(clouds={"c": random_document(0).clouds["cloud0"]
                                      .painted((1, 2, 3))})
        # use a clean cloud named "c"
        cloud = PointCloud(np.random.default_rng(0).normal(size=(40, 3))
                           * [2, 1, 0.5], name="c")
        doc = ProjectDocument(clouds={"c": cloud})
        out = apply_operation(doc, "insert_scaffold_obb",
                              {"cloud": "c", "assembly": "obj"})
        assert "obj" in out.assemblies
        assert out.assemblies["obj"].parts[0].n_slices == 5
        assert "obj" not in doc.assemblies     # input untouched

    def test_pov_insert_uses_direction(self):
        cloud = PointCloud(np.random.default_rng(1).normal(size=(40, 3)),
                           name="c")
        doc = ProjectDocument(clouds={"c": cloud})
        out = apply_operation(doc, "insert_scaffold_pov",
                              {"cloud": "c", "assembly": "obj",
                               "view_direction": [0.0, 0.0, 1.0]})
        s = out.assemblies["obj"].parts[0]
        for sl in s.slices:
            np.testing.assert_allclose(np.abs(sl.normal), [0, 0, 1],
                                       atol=1e-9)

    def test_unknown_operation(self):
        with pytest.raises(InvalidOperationError, match="unknown operation"):
            apply_operation(ProjectDocument(), "frobnicate", {})

    def test_every_scaffold_edit_registered(self):
        expected = {"insert_scaffold_obb", "insert_scaffold_pov",
                    "reverse_sweep", "permute_sweep_axis", "transform_slice",
                    "transform_scaffold", "set_slice_spacing_scale",
                    "insert_slice", "delete_slice", "move_handle",
                    "apply_pattern", "copy_handles", "add_hole", "scale_hole",
                    "set_sweep_axis_2d", "shrink_wrap"}
        assert expected <= set(registered_operations())

    def test_record_waypoint_builds_path(self):
        doc = ProjectDocument()
        pose = {"position": [0.0, 0.0, 0.0],
                "orientation": [1.0, 0.0, 0.0, 0.0]}
        grasp = {"position": [1.0, 0.0, 0.0],
                 "orientation": [1.0, 0.0, 0.0, 0.0]}
        doc = apply_operation(doc, "record_waypoint",
                              {"name": "p", "pre_pose": pose, "pose": grasp})
        assert len(doc.paths["p"].poses) == 2
        doc = apply_operation(doc, "record_waypoint",
                              {"name": "p", "pose": pose})
        assert len(doc.paths["p"].poses) == 3

    def test_paint_cloud_rebinds_scaffolds(self):
        doc = cup_with_handle_doc()
        out = apply_operation(doc, "paint_cloud",
                              {"cloud": "scan", "color": [9, 9, 9]})
        assert np.all(out.clouds["scan"].colors == 9)
        # The scaffold's source cloud follows, keeping the doc invariant.
        assert np.all(out.assemblies["mug"].parts[0].cloud.colors == 9)


class TestSessionLog:
    def test_timestamps_must_be_monotonic(self):
        log = SessionLog()
        log.append("a", {}, timestamp=5.0)
        with pytest.raises(InvalidOperationError, match="monotonic"):
            log.append("b", {}, timestamp=4.0)

    def test_total_duration(self):
        log = SessionLog()
        log.append("a", {}, duration=2.0, timestamp=0.0)
        log.append("b", {}, duration=3.5, timestamp=1.0)
        assert log.total_duration == 5.5

    def test_json_round_trip(self):
        _, log, _ = build_session(0, 10)
        back = SessionLog.from_list(json.loads(json.dumps(log.to_list())))
        assert back.to_list() == log.to_list()

    @pytest.mark.parametrize("seed", range(5))
    def test_replay_reproduces_final_document(self, seed):
        initial, log, final = build_session(seed, 20)
        assert documents_equal(replay(initial, log), final)

    def test_replay_after_serialization_of_everything(self, tmp_path):
        initial, log, final = build_session(99, 15)
        p = tmp_path / "init.scafproj"
        save_project(initial, p)
        log2 = SessionLog.from_list(json.loads(json.dumps(log.to_list())))
        assert documents_equal(replay(load_project(p), log2), final)
