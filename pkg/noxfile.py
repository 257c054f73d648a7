import nox


@nox.session(python=["3.10", "3.11", "3.12"], venv_params=["--system-site-packages"])
def tests(session: nox.Session):
    session.run("poetry", "install", external=True)
    session.run(
        "pytest", "-m", "not long_running", "--doctest-modules", "syssynth", "tests",
        *session.posargs,
    )


@nox.session(python="3.12", venv_params=["--system-site-packages"])
def scale(session: nox.Session):
    session.run("poetry", "install", external=True)
    session.run("pytest", "-m", "long_running", *session.posargs)
