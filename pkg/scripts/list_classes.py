"""Print the class table: label, abstract group, order and generator actions."""

from monofix.classes import representatives
from monofix.coeff_field import TowerField
from monofix.monomial_action import MonomialAutomorphism


def main():
    field = TowerField()
    for rep in representatives():
        cid = rep.class_id
        acts = "; ".join(MonomialAutomorphism(m, (field.one(),) * len(m)).describe()
                         for m in rep.generator_matrices)
        print(f"{cid.label:10s} {cid.abstract_group:7s} |G|={cid.order:<3d} {acts}")


if __name__ == "__main__":
    main()
