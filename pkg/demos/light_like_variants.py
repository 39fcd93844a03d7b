"""Choosing between the two sign conventions of the light-like AdS families.

Both light-like families (one of case II, one of case III) admit two
plausible sign conventions for their defining data.  Each convention is
built and run through the structural checks; exactly one survives in each
family.  The failures are informative: one case-II variant is not a
spacelike immersion at all, and one case-III variant has incompatible
companion equations.

    python demos/light_like_variants.py
"""

from delta_ideal.families import resolve_variants


def main():
    for family in ("CHn_IIc", "CHn_IIIc"):
        res = resolve_variants(family, 5, n_points=4, seed=0)
        print(f"{family}: selected variant {res.selected!r}")
        for name, cert in res.certificates.items():
            if cert.construction_error:
                why = cert.construction_error
            elif cert.errors:
                why = cert.errors[0]
            else:
                why = f"gauss {cert.maxima['gauss_res']:.1e}, codazzi {cert.maxima['codazzi_res']:.1e}"
            print(f"  {name:<12} structural {'ok' if cert.structural_ok else 'FAILED'}: {why[:110]}")


if __name__ == "__main__":
    main()
