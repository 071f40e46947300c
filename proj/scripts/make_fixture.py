"""Writes fixtures/scenarios/verano-s1-s7.json in canonical form (sorted keys, 2-space indent)."""
import json
import pathlib

def screw(turns):
    return {"composite": "screw", "sequence": [{"kind": "rotate", "direction": "cw", "turns": turns}, {"kind": "press"}]}

def unscrew(turns):
    return {"composite": "unscrew", "sequence": [{"kind": "press"}, {"kind": "rotate", "direction": "ccw", "turns": turns}]}

def lift(ms):
    return {"composite": "lift", "sequence": [{"kind": "hold", "min_ms": ms}, {"kind": "hide"}]}

PRESS = {"kind": "press"}

def step(id, stage, part, action, requires, text, voice, tool=None, torque=None):
    s = {"id": id, "stage": stage, "part": part, "action": action, "requires": sorted(requires),
         "prompt_text": text, "prompt_voice": voice}
    if tool:
        s["tool"] = tool
    if torque is not None:
        s["torque_nm"] = torque
    return s

parts = [
    ("p-workbench", "Workbench and protective gear", "assembly"),
    ("p-toolbox", "Toolbox", "assembly"),
    ("p-test-bolt", "Torque test bolt", "fastener"),
    ("p-cover-bolts", "Valve cover bolts", "fastener"),
    ("p-valve-cover", "Valve cover", "component"),
    ("p-intake-bolts", "Intake manifold bolts", "fastener"),
    ("p-oil-cooler", "Oil cooler", "component"),
    ("p-water-pump", "Water pump", "component"),
    ("p-fuel-rail", "Fuel rail", "component"),
    ("p-injectors", "Fuel injectors", "component"),
    ("p-cylinder-head", "Cylinder head", "assembly"),
    ("p-piston", "Piston and connecting rod", "assembly"),
    ("p-parts-tray", "Parts tray", "assembly"),
]

tools = [
    {"id": "t-torque-wrench", "name": "Torque wrench", "slot": 0, "torque_nm": 35.0},
    {"id": "t-socket-10", "name": "10 mm socket wrench", "slot": 1},
    {"id": "t-socket-13", "name": "13 mm socket wrench", "slot": 2},
    {"id": "t-injector-puller", "name": "Injector puller", "slot": 3},
    {"id": "t-breaker-bar", "name": "Breaker bar", "slot": 4},
    {"id": "t-ring-compressor", "name": "Piston ring compressor", "slot": 5},
]

stages = [
    ("S1", "preparing all needs"),
    ("S2", "setup tools (correct torque)"),
    ("S3", "screws"),
    ("S4", "oil cooler & water pump"),
    ("S5", "fuel rail & injectors"),
    ("S6", "piston & cylinder"),
    ("S7", "arrange parts correctly"),
]

steps = [
    step("s1-gear", "S1", "p-workbench", PRESS, [],
         "Put on gloves and goggles and clear the workbench.", "Put on your protective gear."),
    step("s1-toolbox", "S1", "p-toolbox", PRESS, [],
         "Open the toolbox and check that every tool is in its slot.", "Open the toolbox."),
    step("s2-torque-check", "S2", "p-test-bolt", screw(1), ["s1-gear", "s1-toolbox"],
         "Set the torque wrench to 35 N·m and tighten the test bolt.", "Set the torque wrench to thirty-five newton metres.",
         tool="t-torque-wrench", torque=35.0),
    step("s2-release", "S2", "p-test-bolt", unscrew(1), ["s2-torque-check"],
         "Release the test bolt with the torque wrench.", "Release the test bolt.",
         tool="t-torque-wrench"),
    step("s3-cover-bolts", "S3", "p-cover-bolts", unscrew(3), ["s2-release"],
         "Remove the valve cover bolts with the 10 mm socket.", "Remove the valve cover bolts.",
         tool="t-socket-10"),
    step("s3-cover", "S3", "p-valve-cover", lift(500), ["s3-cover-bolts"],
         "Lift the valve cover off the cylinder head.", "Lift off the valve cover."),
    step("s3-intake-bolts", "S3", "p-intake-bolts", unscrew(4), ["s2-release"],
         "Remove the intake manifold bolts with the 13 mm socket.", "Remove the intake manifold bolts.",
         tool="t-socket-13"),
    step("s4-oil-cooler", "S4", "p-oil-cooler", unscrew(2), ["s3-cover", "s3-intake-bolts"],
         "Unscrew the oil cooler.", "Unscrew the oil cooler.", tool="t-socket-13"),
    step("s4-water-pump", "S4", "p-water-pump", unscrew(2), ["s3-cover"],
         "Unscrew the water pump.", "Unscrew the water pump.", tool="t-socket-10"),
    step("s5-fuel-rail", "S5", "p-fuel-rail", unscrew(2), ["s4-oil-cooler", "s4-water-pump"],
         "Unbolt the fuel rail.", "Unbolt the fuel rail.", tool="t-socket-10"),
    step("s5-injectors", "S5", "p-injectors", lift(300), ["s5-fuel-rail"],
         "Pull the injectors out of their bores.", "Pull out the injectors.", tool="t-injector-puller"),
    step("s6-cylinder-head", "S6", "p-cylinder-head", unscrew(5), ["s5-injectors"],
         "Loosen the cylinder head bolts in sequence and lift the head.", "Loosen the cylinder head bolts.",
         tool="t-breaker-bar"),
    step("s6-piston", "S6", "p-piston", lift(1000), ["s6-cylinder-head"],
         "Compress the rings and draw the piston out of the cylinder.", "Draw out the piston.",
         tool="t-ring-compressor"),
    step("s7-sort", "S7", "p-parts-tray", PRESS, ["s6-piston"],
         "Lay every removed part on the tray in removal order.", "Arrange the parts on the tray."),
    step("s7-shelve", "S7", "p-toolbox", PRESS, ["s7-sort"],
         "Return every tool to its slot in the toolbox.", "Put the tools back."),
]

doc = {
    "format": 1,
    "id": "verano-s1-s7",
    "engine_name": "Buick Verano 1.5T (illustrative procedure)",
    "direction": "disassembly",
    "parts": [{"id": i, "name": n, "category": c, "initial_state": "installed"} for i, n, c in parts],
    "tools": tools,
    "stages": [{"id": i, "title": t} for i, t in stages],
    "steps": steps,
    "tutorial": [
        {"title": "About this procedure",
         "body": "The step content is an illustrative desk-scale procedure for training, not a service-manual sequence."},
        {"title": "Engine structure", "body": "Cylinder head, valve cover, intake, cooling and fuel systems.",
         "media": "structure/overview.png"},
        {"title": "Torque settings", "body": "Torque-critical fasteners list their setting in N·m."},
    ],
}

out = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "scenarios" / "verano-s1-s7.json"
out.write_text(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
print(out)
