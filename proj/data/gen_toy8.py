# Regenerates toy8.lef: python3 gen_toy8.py 1.5 > toy8.lef (argument is the row height in um).
import sys
H = float(sys.argv[1])
cells = {
 "AOI21X1": (11, [("A0",2),("A1",4),("B0",6),("Z",8)]),
 "BUFX1": (8, [("A",2),("Z",5)]),
 "DFFX1": (15, [("D",2),("CK",5),("Q",9),("QN",12)]),
 "INVX1": (7, [("A",2),("Z",4)]),
 "MUX2X1": (13, [("A",2),("B",4),("S",6),("Z",10)]),
 "NAND2X1": (9, [("A",2),("B",4),("Z",6)]),
 "NOR2X1": (9, [("Z",2),("A",4),("B",6)]),
 "XOR2X1": (8, [("B",3),("Z",5),("A",7)]),
}
f = lambda v: f"{v:.3f}"
out = ["VERSION 5.8 ;", ""]
for name,(tracks,pins) in cells.items():
    w = tracks*0.11
    out += [f"MACRO {name}", "  CLASS CORE ;", f"  SIZE {f(w)} BY {f(H)} ;"]
    for i,(p,t) in enumerate(pins):
        x = 0.055 + 0.11*t
        y0, y1 = 0.15, H-0.15
        if name == "XOR2X1" and p == "A": y1 = 0.25
        out += [f"  PIN {p}", "    USE SIGNAL ;", "    PORT", f"      LAYER M1 MASK {1 + i%2} ;",
                f"        RECT {f(x-0.025)} {f(y0)} {f(x+0.025)} {f(y1)} ;", "    END", f"  END {p}"]
    out += ["  PIN VDD","    USE POWER ;","    PORT","      LAYER M1 ;",f"        RECT 0.000 {f(H-0.05)} {f(w)} {f(H)} ;","    END","  END VDD"]
    out += ["  PIN VSS","    USE GROUND ;","    PORT","      LAYER M1 ;",f"        RECT 0.000 0.000 {f(w)} 0.050 ;","    END","  END VSS"]
    if name == "XOR2X1":
        out += ["  OBS","    LAYER M2 ;","      RECT 0.025 0.125 0.080 0.275 ;","  END"]
    out += [f"END {name}", ""]
out.append("END LIBRARY")
print("\n".join(out))
