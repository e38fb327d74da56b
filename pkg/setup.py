from setuptools import setup, find_packages

setup(
    name="DepthActionRecognition",
    version="0.1.0",
    python_requires='>=3.8.0',
    packages=find_packages(exclude=("test",)),
    install_requires=["numpy", "opencv-python-headless", "scikit-learn", "google-cloud-storage", "requests",
                      "coredatamodules @ git+https://github.com/AfricasVoices/CoreDataModules"],
    extras_require={"test": ["pytest"]},
    entry_points={
        "console_scripts": ["depth-action-recognition=cli.action_recognition:main"]
    }
)
