"""Frozen sign and normalization conventions.

Every module that needs one of these reads it from here, so a convention
change happens in exactly one place.

Forms
    A 1-form is stored as ``p10 dz + p01 dzbar`` and a 2-form as
    ``coeff dz^dzbar``.  Since ``dz^dzbar = -2i dx^dy``, an iR-valued 2-form
    has a real ``coeff`` and a real 2-form (such as the area form) has a
    purely imaginary one.

Connections and links
    A unitary connection is ``A = i(A1 dx + A2 dy)``; covariant derivatives
    are ``d_j + i A_j``.  A lattice link is ``u_j(n) = exp(i A_j h)``, the
    covariant forward difference is ``(u_j(n) s(n+j) - s(n)) / h`` and the
    plaquette angle is the argument of ``u_x(n) u_y(n+x) conj(u_x(n+y))
    conj(u_y(n))``, which approximates ``h^2 (d1 A2 - d2 A1)``.

Degree
    ``c1 = (i/2pi) int F``.  With the conventions above this equals
    ``-(sum of plaquette angles) / 2pi``, so a bundle of degree ``d`` carries
    a uniform plaquette angle of ``PLAQUETTE_SIGN * 2 pi d / (nx ny)``.
    Positive ``c1`` is the sign for which the covariant dbar operator has
    holomorphic sections (checked by the lattice index computation).

Gaussian curvature
    ``K(rho) = -(2 / rho^2) d_z d_zbar log rho``, i.e. one half of the
    textbook value.  With this normalization the prescribed-curvature
    equation reads ``lap(sigma) = LIOUVILLE_COEFF * c * h^2 e^{2 sigma} -
    lap(log h)`` for the target ``K = -c``.
"""

PLAQUETTE_SIGN = -1
LIOUVILLE_COEFF = 2.0

SNAPSHOT_MAGIC = b"SWRD"
SNAPSHOT_VERSION = 1
DOMAIN_CODES = {"periodic_torus": 0, "disk_patch": 1}
