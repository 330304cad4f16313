import json
import re
import xml.etree.ElementTree as ET

import pytest

from equicover import io
from equicover.cli import main
from equicover.mass import load_mass
from equicover.massgen import random_mass, uniform_square
from equicover.nonspiral import construct_83, verify_83
from equicover.render import render_svg
from equicover.spiral import construct
from equicover.verify import verify_spiral

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def files(tmp_path):
    sq, rnd = tmp_path / "sq.json", tmp_path / "rnd.json"
    assert main(["gen", "square", "--out", str(sq)]) == 0
    assert main(["gen", "tight", "--out", str(tmp_path / "tight.json")]) == 0
    assert main(["gen", "random", "--seed", "1", "--out", str(rnd)]) == 0
    return tmp_path, sq, rnd


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "random", "--seed", "7", "--out", str(a)])
    main(["gen", "random", "--seed", "7", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert load_mass(a) == random_mass(7)


def test_gen_tight_validates(tmp_path):
    out = tmp_path / "t.json"
    assert main(["gen", "tight", "--epsilon", "0.01", "--out", str(out)]) == 0
    assert len(load_mass(out).parts) == 3


def test_classify(capsys):
    assert main(["classify", "--p", "4", "--q", "9"]) == 0
    assert capsys.readouterr().out.strip() == "OpenEvenCase"


def test_construct_exit_codes(files, capsys):
    tmp, sq, _ = files
    assert main(["construct", str(sq), "--p", "1", "--q", "3", "--out", str(tmp / "c.json")]) == 0
    capsys.readouterr()
    assert main(["construct", str(sq), "--p", "2", "--q", "3"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "infeasible" and "combined measure" in doc["reason"]
    # The tight mass has no convex (9, 4) spiral on a small grid; the square does.
    assert main(["construct", str(tmp / "tight.json"), "--p", "4", "--q", "9", "--budget", "4x8"]) == 3
    assert main(["construct", str(sq), "--p", "2", "--q", "4"]) == 2
    assert main(["construct", str(tmp / "missing.json"), "--p", "1", "--q", "3"]) == 2


def test_construct_nonspiral(files, capsys):
    tmp, _, rnd = files
    out = tmp / "c83.json"
    assert main(["construct", str(rnd), "--p", "3", "--q", "8", "--nonspiral", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "general" and len({tuple(p["apex"]) for p in doc["pieces"]}) == 2
    assert main(["construct", str(rnd), "--p", "1", "--q", "3", "--nonspiral"]) == 2


def test_verify_round_trip_and_faults(files, capsys):
    tmp, sq, rnd = files
    cover_path = tmp / "c.json"
    main(["construct", str(rnd), "--p", "2", "--q", "7", "--out", str(cover_path)])
    capsys.readouterr()
    assert main(["verify", str(rnd), str(cover_path)]) == 0
    cli_report = json.loads(capsys.readouterr().out)
    mass = load_mass(rnd)
    direct = verify_spiral(mass, construct(mass, 2, 7).cover).to_dict()
    assert cli_report == json.loads(io.dump_json(direct))

    doc = json.loads(cover_path.read_text())
    doc["pieces"][0]["sweep"] += 0.2
    bad = tmp / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["verify", str(rnd), str(bad)]) == 1
    capsys.readouterr()

    assert main(["verify", str(sq), str(cover_path)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert any(f["kind"] == "measure" for f in report["failures"])

    garbage = tmp / "garbage.json"
    garbage.write_text("{not json")
    assert main(["verify", str(rnd), str(garbage)]) == 2


def test_general_cover_round_trip(tmp_path):
    mass = random_mass(2)
    cover = construct_83(mass, 0.3)
    path = tmp_path / "g.json"
    io.save_cover(cover, path)
    back = io.load_cover(path)
    assert back.pieces == cover.pieces and back.centers == cover.centers
    assert verify_83(mass, back).to_dict() == verify_83(mass, cover).to_dict()


def test_spiral_cover_round_trip(tmp_path):
    mass = random_mass(3)
    cover = construct(mass, 3, 7).cover
    path = tmp_path / "s.json"
    io.save_cover(cover, path)
    back = io.load_cover(path)
    assert back.pieces == cover.pieces and back.orbit_tag == cover.orbit_tag
    assert verify_spiral(mass, back).to_dict() == verify_spiral(mass, cover).to_dict()
    d = json.loads(path.read_text())
    assert set(d) >= {"apex", "p", "q", "rays", "pieces"}


def _paths(svg):
    root = ET.fromstring(svg)
    return [el for el in root.iter(f"{SVG}path") if el.get("class") == "sector"]


def test_render_counts_sectors(files):
    tmp, _, rnd = files
    cover_path, svg = tmp / "c.json", tmp / "c.svg"
    main(["construct", str(rnd), "--p", "5", "--q", "12", "--out", str(cover_path)])
    assert main(["render", str(rnd), str(cover_path), "--out", str(svg)]) == 0
    assert len(_paths(svg.read_text())) == 12
    again = tmp / "again.svg"
    main(["render", str(rnd), str(cover_path), "--out", str(again)])
    assert again.read_bytes() == svg.read_bytes()


def test_render_mass_only():
    svg = render_svg(uniform_square())
    root = ET.fromstring(svg)
    assert len(list(root.iter(f"{SVG}polygon"))) == 1
    assert not _paths(svg)


def test_render_two_centers():
    mass = random_mass(4)
    svg = render_svg(mass, construct_83(mass))
    centers = set(re.findall(r'data-apex="([^"]+)"', svg))
    assert len(centers) == 2 and len(_paths(svg)) == 8


def test_search_command(files, capsys):
    tmp, sq, _ = files
    assert main(["search", str(sq), "--p", "1", "--q", "3", "--budget", "2x4"]) == 0
    capsys.readouterr()
    assert main(["search", str(tmp / "tight.json"), "--p", "4", "--q", "9", "--budget", "2x4"]) == 3
    assert json.loads(capsys.readouterr().out)["regime"] == "OpenEvenCase"


def test_bad_budget():
    with pytest.raises(SystemExit):
        main(["search", "x.json", "--p", "1", "--q", "3", "--budget", "fifty"])
