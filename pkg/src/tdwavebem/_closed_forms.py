"""Closed-form antiderivatives for retarded triangle potentials.

Generated by tools/gen_closed_forms.py -- do not edit by hand.
All functions expect z >= 0 and abs(y) bounded away from zero;
callers pass |z| and handle odd-in-z signs explicitly.
"""
from numpy import arctan, arcsinh, sqrt

__all__ = ["UW_FORMS", "BM_FORMS"]

def uw_d1(x, y, z, s):
    """UW closed forms for order d=1: returns (F, Fz)."""
    x0 = x/y
    x1 = arctan(x0)
    x2 = ((z)*(z))
    x3 = ((y)*(y))
    x4 = x2 + x3
    x5 = ((x)*(x))
    x6 = x4 + x5
    x7 = x0*z/sqrt(x6)
    x8 = s*arctan(x7)
    x9 = x2/x6
    return (-s*y*arcsinh(x/sqrt(x4)) + (1/2)*x*y + (1/2)*x1*(((s)*(s)) + x2) - x8*z, s*x*y*z/(x4**(3/2)*sqrt(1 + x5/x4)) + s*x7*(x9 - 1)/(1 + x5*x9/x3) + x1*z - x8)

def bm_d1(x, y, z, s):
    """BM closed forms for order d=1: returns (g, gz, Fy, Fz, Fs, Fzy, Fzz, Fzs)."""
    x0 = ((z)*(z))
    x1 = ((s)*(s)) + x0
    x2 = y**(-1.0)
    x3 = ((x)*(x))
    x4 = ((y)*(y))
    x5 = x4**(-1.0)
    x6 = x3*x5
    x7 = (x6 + 1)**(-1.0)
    x8 = x2*x7
    x9 = x0 + x4
    x10 = 1/sqrt(x9)
    x11 = x3/x9 + 1
    x12 = 1/sqrt(x11)
    x13 = s*x12
    x14 = x13*y
    x15 = x3 + x9
    x16 = x15**(-1.0)
    x17 = x16*x3
    x18 = x17 - 1
    x19 = 1/sqrt(x15)
    x20 = x0*x16
    x21 = x20*x6 + 1
    x22 = x21**(-1.0)
    x23 = s*x22
    x24 = x19*x23
    x25 = x2*x24
    x26 = x18*x25
    x27 = x9**(-3/2)
    x28 = x13*x27
    x29 = x28*y
    x30 = x9**(-5/2)
    x31 = x11**(-3/2)
    x32 = s*x3
    x33 = x31*x32
    x34 = x20 - 1
    x35 = x15**(-3/2)
    x36 = 2*x35/((x21)*(x21))
    x37 = x36/((y)*(y)*(y))
    x38 = 3*x0
    x39 = x38/((x15)*(x15))
    x40 = (1/2)*x
    x41 = arcsinh(x*x10)
    x42 = x5*x7
    x43 = x16 + x5
    x44 = x24*x43
    x45 = x*x2
    x46 = arctan(x45)
    x47 = x19*x45
    x48 = x47*z
    x49 = arctan(x48)
    x50 = x*z
    x51 = x34*x48
    x52 = x9**(-7/2)
    x53 = s*x0
    x54 = ((x)*(x)*(x))*x53
    x55 = x23*x34
    return (x0*x26 + (1/2)*x1*x8 - x10*x14 + (1/2)*y, z*(x0*x18*x32*x34*x37 - x25*(-x17 - x20 + x3*x39 + 1) + x26 + x29 - x30*x33*y + x8), -s*x41 + x*x0*x44 + x*x28*x4 - x1*x40*x42 + x40, -s*x49 + x23*x51 + x29*x50 + x46*z, s*x46 - x41*y - x49*z, x50*(-3*x13*x30*x4 - x24*(-x16 + x20*x5 + x39 - x5) + x28 + x33*x4*x52 + x34*x36*x43*x53*x6 - x42 + x44), -x*x14*x30*x38 + x*x29 + x31*x52*x54*y + ((x34)*(x34))*x37*x54 - x35*x38*x45*x55 + x46 + 2*x47*x55, x12*x27*x50*y + x22*x51 - x49)

def uw_d2(x, y, z, s):
    """UW closed forms for order d=2: returns (F, Fz)."""
    x0 = ((s)*(s))
    x1 = ((z)*(z))
    x2 = 3*x1
    x3 = y**(-1.0)
    x4 = x*x3
    x5 = arctan(x4)
    x6 = ((x)*(x))
    x7 = ((y)*(y))
    x8 = x1 + x7
    x9 = x6 + x8
    x10 = sqrt(x9)
    x11 = x*y
    x12 = 6*x0 + x2 + x7
    x13 = y*arcsinh(x/sqrt(x8))
    x14 = x10**(-1.0)
    x15 = x14*z
    x16 = arctan(x15*x4)
    x17 = 3*x0 + x1
    x18 = x16*x17
    x19 = x1/x9
    return ((1/3)*s*x5*(x0 + x2) + (1/6)*x11*(6*s - x10) - 1/6*x12*x13 - 1/3*x18*z, 2*s*x5*z + (1/6)*x*x12*y*z/(x8**(3/2)*sqrt(x6/x8 + 1)) + (1/3)*x*x14*x17*x3*z*(x19 - 1)/(x19*x6/x7 + 1) - 2/3*x1*x16 - 1/6*x11*x15 - x13*z - 1/3*x18)

def bm_d2(x, y, z, s):
    """BM closed forms for order d=2: returns (g, gz, Fy, Fz, Fs, Fzy, Fzz, Fzs)."""
    x0 = ((x)*(x))
    x1 = ((y)*(y))
    x2 = ((z)*(z))
    x3 = x1 + x2
    x4 = x0 + x3
    x5 = sqrt(x4)
    x6 = x5**(-1.0)
    x7 = x6*y
    x8 = 6*s - x5
    x9 = ((s)*(s))
    x10 = 3*x2
    x11 = x10 + x9
    x12 = y**(-1.0)
    x13 = x1**(-1.0)
    x14 = x0*x13
    x15 = 2*s
    x16 = x15/(x14 + 1)
    x17 = x12*x16
    x18 = x1 + x10 + 6*x9
    x19 = 1/sqrt(x3)
    x20 = x0/x3 + 1
    x21 = 1/sqrt(x20)
    x22 = x21*y
    x23 = x19*x22
    x24 = x4**(-1.0)
    x25 = x0*x24
    x26 = x25 - 1
    x27 = x12*x6
    x28 = x26*x27
    x29 = x2 + 3*x9
    x30 = x2*x24
    x31 = x14*x30 + 1
    x32 = x31**(-1.0)
    x33 = x29*x32
    x34 = x2*x33
    x35 = x4**(-3/2)
    x36 = (1/6)*x35
    x37 = x0*y
    x38 = x3**(-3/2)
    x39 = x18*x38
    x40 = (1/6)*x39
    x41 = x18/x3**(5/2)
    x42 = (1/6)/x20**(3/2)
    x43 = (2/3)*x2
    x44 = x32*x43
    x45 = (1/3)*x29
    x46 = x32*x45
    x47 = x27*x46
    x48 = x30 - 1
    x49 = x31**(-2.0)
    x50 = x29*x35*x43*x49/((y)*(y)*(y))
    x51 = x10/((x4)*(x4))
    x52 = arcsinh(x*x19)
    x53 = x*x6
    x54 = x*x13*x16
    x55 = x13 + x24
    x56 = x*x12
    x57 = arctan(x56)
    x58 = x52*y
    x59 = x6*z
    x60 = x*y
    x61 = (1/6)*x60
    x62 = x56*x59
    x63 = arctan(x62)
    x64 = s*x63
    x65 = 2*z
    x66 = x*x1
    x67 = x21*x66
    x68 = (1/2)*x41
    x69 = ((x)*(x)*(x))
    x70 = x18*x42*x69/x3**(7/2)
    x71 = x46*x53
    x72 = x2*x60
    x73 = x21*x38
    x74 = x48*x56
    x75 = x6*x74
    return (-1/6*x0*x7 + (1/6)*x11*x17 - 1/6*x18*x23 + (1/3)*x28*x34 + (1/6)*x8*y, z*(x0*x26*x48*x50 + x17 + x22*x40 - x23 + x26*x47 + x28*x44 + x36*x37 - x37*x41*x42 - x47*(x0*x51 - x25 - x30 + 1) - 1/6*x7), (1/6)*x*x1*x18*x21*x38 + (1/3)*x*x2*x29*x32*x55*x6 + (1/6)*x*x8 - 1/3*x1*x52 - 1/6*x1*x53 - 1/6*x11*x54 - 1/6*x18*x52, 2*s*x57*z + (1/3)*x*x12*x29*x32*x48*x6*z + (1/6)*x*x18*x21*x38*y*z - x43*x63 - x45*x63 - x58*z - x59*x61, x*y - x15*x58 + x57*(x2 + x9) - x64*x65, z*(x*x21*x40 + x1*x70 + x13*x29*x35*x43*x48*x49*x55*x69 + x36*x66 + (4/3)*x38*x67 + x44*x53*x55 - x52 - 1/6*x53 - x54 + x55*x71 - x67*x68 - x71*(x13*x30 - x13 - x24 + x51)), x15*x57 + (4/3)*x2*x32*x75 + x2*x70*y + x21*x39*x61 - x21*x68*x72 + (2/3)*x33*x75 - x34*x35*x74 + x36*x72 + ((x48)*(x48))*x50*x69 - x58 - x6*x61 - x63*x65 + 2*x72*x73, 2*s*x32*x48*x62 + 2*s*x60*x73*z + 2*x57*z - 2*x64)

def uw_d3(x, y, z, s):
    """UW closed forms for order d=3: returns (F, Fz)."""
    x0 = y**(-1.0)
    x1 = x*x0
    x2 = arctan(x1)
    x3 = ((s)*(s))
    x4 = ((z)*(z))
    x5 = 6*x4
    x6 = x3 + x4
    x7 = ((x)*(x))
    x8 = ((y)*(y))
    x9 = x4 + x8
    x10 = x7 + x9
    x11 = sqrt(x10)
    x12 = x11**(-1.0)
    x13 = s*arctan(x1*x12*z)
    x14 = x13*x6
    x15 = s*y*arcsinh(x/sqrt(x9))
    x16 = 2*x3 + 3*x4 + x8
    x17 = x4/x10
    return ((1/12)*x*y*(-6*s*x11 + 18*x3 + x5 + x7 + 3*x8) - x14*z - 1/2*x15*x16 + (1/4)*x2*(((s)*(s)*(s)*(s)) + x3*x5 + ((z)*(z)*(z)*(z))), s*x*x0*x12*x6*z*(x17 - 1)/(x17*x7/x8 + 1) + (1/2)*s*x*x16*y*z/(x9**(3/2)*sqrt(x7/x9 + 1)) - 1/2*x*y*z*(s*x12 - 2) - 2*x13*x4 - x14 - 3*x15*z + x2*z*(3*x3 + x4))

def bm_d3(x, y, z, s):
    """BM closed forms for order d=3: returns (g, gz, Fy, Fz, Fs, Fzy, Fzz, Fzs)."""
    x0 = ((x)*(x))
    x1 = ((y)*(y))
    x2 = ((z)*(z))
    x3 = x1 + x2
    x4 = x0 + x3
    x5 = sqrt(x4)
    x6 = x5**(-1.0)
    x7 = s*x6
    x8 = x0*y
    x9 = y**(-1.0)
    x10 = x1**(-1.0)
    x11 = x0*x10
    x12 = (x11 + 1)**(-1.0)
    x13 = x12*x9
    x14 = ((s)*(s))
    x15 = 6*x2
    x16 = (1/4)*((s)*(s)*(s)*(s)) + (1/4)*x14*x15 + (1/4)*((z)*(z)*(z)*(z))
    x17 = 6*s
    x18 = x0 + 3*x1 + 18*x14 + x15 - x17*x5
    x19 = 2*x14
    x20 = 3*x2
    x21 = x1 + x19 + x20
    x22 = (1/2)*x21
    x23 = 1/sqrt(x3)
    x24 = x0/x3 + 1
    x25 = 1/sqrt(x24)
    x26 = s*x25
    x27 = x26*y
    x28 = x23*x27
    x29 = x14 + x2
    x30 = x4**(-1.0)
    x31 = x0*x30
    x32 = x31 - 1
    x33 = x29*x32
    x34 = x2*x30
    x35 = x11*x34 + 1
    x36 = x35**(-1.0)
    x37 = x36*x7
    x38 = x37*x9
    x39 = x33*x38
    x40 = (1/2)*x7 - 1
    x41 = x40*y
    x42 = x4**(-3/2)
    x43 = s*x42
    x44 = 3*x14 + x2
    x45 = x3**(-3/2)
    x46 = x22*x45
    x47 = x27*x46
    x48 = x3**(-5/2)
    x49 = x22/x24**(3/2)
    x50 = s*x49
    x51 = 2*x2
    x52 = x34 - 1
    x53 = x35**(-2.0)
    x54 = s*x2
    x55 = x42*x54
    x56 = 2*x53*x55/((y)*(y)*(y))
    x57 = x20/((x4)*(x4))
    x58 = arcsinh(x*x23)
    x59 = s*x58
    x60 = (1/2)*x
    x61 = x1*x60
    x62 = x*x10*x12
    x63 = x10 + x30
    x64 = 3*x59
    x65 = x64*y
    x66 = x*x9
    x67 = arctan(x66)
    x68 = x*z
    x69 = x6*z
    x70 = x66*x69
    x71 = arctan(x70)
    x72 = 2*x71
    x73 = x29*x71
    x74 = x58*y
    x75 = x19*x71
    x76 = x*x26
    x77 = x1*x76
    x78 = (3/2)*x21*x48
    x79 = ((x)*(x)*(x))
    x80 = x79/x3**(7/2)
    x81 = x29*x37
    x82 = x*x81
    x83 = x29*x52
    x84 = x60*y
    x85 = x25*y
    x86 = x52*x66
    x87 = x68*x85
    x88 = x36*x70
    return (x13*x16 + (1/12)*x18*y + x2*x39 - x22*x28 - 1/6*x8*(3*x7 - 1), z*(x0*x33*x52*x56 + x13*x44 - 3*x28 - x29*x38*(x0*x57 - x31 - x34 + 1) + x32*x38*x51 + x39 - x41 + (1/2)*x43*x8 + x47 - x48*x50*x8), (1/2)*s*x*x1*x21*x25*x45 + s*x*x2*x29*x36*x6*x63 + (1/12)*x*x18 - x1*x59 - x16*x62 - x22*x59 - x61*(x7 - 1), (1/2)*s*x*x21*x25*x45*y*z + s*x*x29*x36*x52*x6*x9*z - s*x73 - x41*x68 + x44*x67*z - x54*x72 - x65*z, s*x67*(x14 + x20) + (1/2)*x*y*(x17 - x5) - x19*x74 - x22*x74 - x73*z - x75*z, z*(x*x37*x51*x63 - x*x40 + x1*x50*x80 + 2*x10*x53*x55*x63*x79*x83 + x43*x61 - x44*x62 + 4*x45*x77 + x46*x76 + x63*x82 - x64 - x77*x78 - x82*(x10*x34 - x10 - x30 + x57)), x*x15*x27*x45 + x*x47 - x*x54*x78*x85 - x17*x71*z + 4*x2*x37*x86 - x20*x36*x43*x66*x83 + x29*((x52)*(x52))*x56*x79 + 3*x29*x67 + x49*x54*x80*y - x65 + 2*x81*x86 + x84*(x55 - x7 + 2), x17*x67*z + x19*x45*x87 + x19*x52*x88 - x2*x72 + x46*x87 - x69*x84 - x73 - 3*x74*z - x75 + x83*x88)

UW_FORMS = {1: uw_d1, 2: uw_d2, 3: uw_d3}
BM_FORMS = {1: bm_d1, 2: bm_d2, 3: bm_d3}
