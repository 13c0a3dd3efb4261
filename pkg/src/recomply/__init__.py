"""recomply: rule-driven security compliance testing on simulated networks.

A library plus CLI that runs vulnerability-assessment and penetration-test
sessions against seeded virtual LANs, captures the decision trace, distills
it into validated attack-vector expertise, and replays that expertise to cut
the cost of re-tests and of first assessments on similar networks.
"""

__version__ = "0.1.0"
