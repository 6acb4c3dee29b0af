"""Ai and Ai' at Taylor patch centres. Generated by tools/gen_airy_table.py."""

CENTRE_MIN = -9.5
CENTRE_STEP = 0.5

# (centre, Ai(centre), Ai'(centre))
TABLE = (
    (-9.5, 0.3191032477191282, -0.10809531881187123),
    (-9.0, -0.022133721547341403, -0.9756639809263316),
    (-8.5, -0.33029023763020887, -0.03231334828463914),
    (-8.0, -0.0527050503563862, 0.9355609381983065),
    (-7.5, 0.3217757163806479, 0.3188095066985546),
    (-7.0, 0.18428083525050565, -0.7710081684101265),
    (-6.5, -0.2380203019971158, -0.6749524925132022),
    (-6.0, -0.3291451736298231, 0.3459354872813429),
    (-5.5, 0.017781541276574976, 0.8641972177713984),
    (-5.0, 0.35076100902411433, 0.32719281855444315),
    (-4.5, 0.2921527810559595, -0.5233625323157477),
    (-4.0, -0.07026553294928951, -0.7906285753685813),
    (-3.5, -0.37553382314043193, -0.34344343345404815),
    (-3.0, -0.37881429367765806, 0.3145837692165988),
    (-2.5, -0.11232506769296609, 0.6788527342647943),
    (-2.0, 0.22740742820168558, 0.618259020741691),
    (-1.5, 0.4642565777488694, 0.3091869672024104),
    (-1.0, 0.5355608832923521, -0.01016056711664521),
    (-0.5, 0.4757280916105396, -0.20408167033954738),
    (0.0, 0.3550280538878172, -0.2588194037928068),
    (0.5, 0.23169360648083348, -0.2249105326646839),
    (1.0, 0.13529241631288141, -0.1591474412967932),
    (1.5, 0.07174949700810541, -0.09738201284230132),
    (2.0, 0.03492413042327438, -0.05309038443365363),
    (2.5, 0.01572592338047049, -0.026250881035903232),
    (3.0, 0.006591139357460719, -0.011912976705951319),
    (3.5, 0.002584098786989635, -0.005004413967952583),
    (4.0, 0.0009515638512048018, -0.001958640950204179),
    (4.5, 0.00033025032351430896, -0.0007178665675575089),
    (5.0, 0.00010834442813607442, -0.0002474138908684625),
    (5.5, 3.368531190859981e-05, -8.046339130556515e-05),
    (6.0, 9.947694360252889e-06, -2.4765200397034955e-05),
    (6.5, 2.7958823432049136e-06, -7.231931466601793e-06),
    (7.0, 7.492128863997167e-07, -2.008150894738792e-06),
    (7.5, 1.9172560675134309e-07, -5.312713959720545e-07),
    (8.0, 4.6922076160992316e-08, -1.3414392979067865e-07),
    (8.5, 1.0997009755195506e-08, -3.237725440447602e-08),
)
