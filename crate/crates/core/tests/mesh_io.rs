use std::path::PathBuf;

use minsurf::diffgeo::isometry_deviation_at;
use minsurf::mesh::{
    default_schedule, family_frames, tessellate, write_csv, write_obj, write_ply, Mesh, WriteError,
};
use minsurf::{DomainRect, ParamPoint, SurfaceSelector, SurfaceSpec, Vec3};

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name]
        .iter()
        .collect();
    std::fs::read_to_string(path).unwrap()
}

fn enneper_4x4(normals: bool) -> Mesh {
    let spec = SurfaceSpec::new(3, 1.0).unwrap();
    tessellate(
        &spec,
        SurfaceSelector::Base,
        DomainRect::square(1.0).unwrap(),
        4,
        4,
        normals,
    )
    .unwrap()
}

fn obj_text(mesh: &Mesh) -> String {
    let mut buf = Vec::new();
    write_obj(mesh, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn ply_text(mesh: &Mesh) -> String {
    let mut buf = Vec::new();
    write_ply(mesh, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn parse_xyz<'a>(fields: impl Iterator<Item = &'a str>) -> Vec3 {
    let v: Vec<f64> = fields.map(|s| s.parse().unwrap()).collect();
    Vec3::new(v[0], v[1], v[2])
}

fn decode_obj(text: &str) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => verts.push(parse_xyz(it)),
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|t| t.split('/').next().unwrap().parse::<usize>().unwrap() - 1)
                    .collect();
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    (verts, faces)
}

fn decode_ply(text: &str) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let mut lines = text.lines();
    let mut nv = 0;
    let mut nf = 0;
    for line in lines.by_ref() {
        if let Some(n) = line.strip_prefix("element vertex ") {
            nv = n.parse().unwrap();
        } else if let Some(n) = line.strip_prefix("element face ") {
            nf = n.parse().unwrap();
        } else if line == "end_header" {
            break;
        }
    }
    let verts = lines
        .by_ref()
        .take(nv)
        .map(|l| parse_xyz(l.split_whitespace().take(3)))
        .collect();
    let faces = lines
        .take(nf)
        .map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            assert_eq!(v[0], 3);
            [v[1], v[2], v[3]]
        })
        .collect();
    (verts, faces)
}

#[test]
fn golden_files_match() {
    let mesh = enneper_4x4(false);
    assert_eq!(obj_text(&mesh), golden("enneper_4x4.obj"));
    assert_eq!(ply_text(&mesh), golden("enneper_4x4.ply"));
}

#[test]
fn golden_vertices_match_closed_form() {
    let (verts, _) = decode_obj(&golden("enneper_4x4.obj"));
    assert_eq!(verts.len(), 25);
    for (k, p) in verts.iter().enumerate() {
        let u = -1.0 + 0.5 * (k % 5) as f64;
        let v = -1.0 + 0.5 * (k / 5) as f64;
        let want = Vec3::new(
            -(u * u * u - 3.0 * u * v * v) + u,
            -(v * v * v - 3.0 * v * u * u) + v,
            3f64.sqrt() * (u * u - v * v),
        );
        assert!((p - want).norm() < 1e-15, "vertex {k}");
    }
}

#[test]
fn obj_and_ply_decode_to_the_same_mesh() {
    let spec = SurfaceSpec::new(6, 1.3).unwrap();
    let mesh = tessellate(
        &spec,
        SurfaceSelector::Family(0.4),
        DomainRect::new(-1.0, 0.5, -0.3, 1.2).unwrap(),
        7,
        5,
        true,
    )
    .unwrap();
    let (ov, of) = decode_obj(&obj_text(&mesh));
    let (pv, pf) = decode_ply(&ply_text(&mesh));
    // 17 significant digits round-trip exactly
    assert_eq!(ov, mesh.vertices);
    assert_eq!(pv, mesh.vertices);
    assert_eq!(of, mesh.faces);
    assert_eq!(pf, mesh.faces);
}

#[test]
fn faces_are_counterclockwise_in_parameter_space() {
    let spec = SurfaceSpec::new(5, 1.0).unwrap();
    let mesh = tessellate(
        &spec,
        SurfaceSelector::Base,
        DomainRect::square(1.0).unwrap(),
        6,
        9,
        false,
    )
    .unwrap();
    let mut edges = std::collections::HashMap::new();
    for f in &mesh.faces {
        let [a, b, c] = f.map(|i| mesh.params[i]);
        let area = (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
        assert!(area > 0.0);
        for (x, y) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            // consistent orientation: each directed edge is used at most once
            assert!(edges.insert((x, y), ()).is_none());
        }
    }
}

#[test]
fn normals_are_unit_except_at_singular_vertices() {
    let spec = SurfaceSpec::new(4, 1.0).unwrap();
    let mesh = tessellate(
        &spec,
        SurfaceSelector::Base,
        DomainRect::square(1.0).unwrap(),
        4,
        4,
        true,
    )
    .unwrap();
    for (p, n) in mesh.params.iter().zip(mesh.normals.as_ref().unwrap()) {
        if *p == ParamPoint::new(0.0, 0.0) {
            assert_eq!(n.norm(), 0.0);
        } else {
            assert!((n.norm() - 1.0).abs() < 1e-14);
        }
    }
    let text = obj_text(&mesh);
    assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), 25);
    assert!(text.contains("f 1//1 2//2 6//6"));
}

#[test]
fn csv_has_header_and_one_row_per_vertex() {
    let mesh = enneper_4x4(false);
    let mut buf = Vec::new();
    write_csv(&mesh.samples(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,v,x,y,z"));
    assert_eq!(lines.next(), Some("-1,-1,-3,-3,0"));
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn writers_reject_out_of_range_faces() {
    let mut mesh = enneper_4x4(false);
    mesh.faces.push([0, 1, 99]);
    let mut buf = Vec::new();
    assert!(matches!(
        write_obj(&mesh, &mut buf),
        Err(WriteError::Invalid(_))
    ));
    assert!(matches!(
        write_ply(&mesh, &mut buf),
        Err(WriteError::Invalid(_))
    ));
    assert!(buf.is_empty());
}

#[test]
fn frames_follow_the_associate_family() {
    let spec = SurfaceSpec::new(3, 1.0).unwrap();
    let dom = DomainRect::square(4.0).unwrap();
    let frames = family_frames(&spec, &default_schedule(), dom, 8, 8).unwrap();
    assert_eq!(frames.len(), 6);
    let names: Vec<String> = frames.iter().map(|f| f.file_name()).collect();
    assert_eq!(
        names,
        [
            "frame_0_0.obj",
            "frame_1_314.obj",
            "frame_2_628.obj",
            "frame_3_942.obj",
            "frame_4_1257.obj",
            "frame_5_1571.obj"
        ]
    );
    let last = &frames[5].mesh;
    for (p, x) in last.params.iter().zip(&last.vertices) {
        let s = spec.eval_conjugate(*p);
        assert!((x - s).norm() <= 1e-12 * s.norm().max(1.0));
    }
    for f in &frames {
        for p in &f.mesh.params {
            if let Some((form, k)) = isometry_deviation_at(&spec, f.t, *p) {
                assert!(form < 1e-9 && k < 1e-8);
            }
        }
    }
}
